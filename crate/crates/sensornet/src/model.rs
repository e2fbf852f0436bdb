//! Source text of the bundled sensor network models.

use std::fmt::Write;

use crate::collision::CollisionBehavior;
use crate::topology::Topology;

/// Sensors per model, and sensings per sensor.
pub const SENSORS: usize = 4;
pub const SENSINGS: usize = 3;

const INTERFACES: &str = "\
interface Node
begin
  with Network
    // Receive data from network. data format: (id of originator, sequence no)
    op receive(in data: [Int,Int])
end

interface Network
begin
  with Any
    // Register `node' as part of the network and as able to send to the
    // nodes in `connections'
    op register(in node: Node, connections: List[Node])
  with Node
    op broadcast(in data: [Int,Int])
end
";

const SENSOR: &str = "\
class SensorNode(id: Int, network: Network, noSensings: Int)
implements Node
begin
  var received: List[[Int,Int]] := nil;   // all previously received messages
  var sendqueue: List[[Int,Int]] := nil;  // messages waiting to be sent
  var seqNo: Int := 0;                    // running package sequence number
  var sending: Bool := false;
  var start: Bool := false;

  // Forward (or send) a single message from the queue
  op sendOrForward ==
    var t: Time := now;
    var l: Tag[ ];
    await sending = false;
    sending := true;
    l!network.broadcast(head(sendqueue));
    sendqueue := tail(sendqueue);
    await l?;
    await now > t;
    sending := false

  op store(in data: [Int,Int]) ==
    sendqueue := sendqueue |- data

  // Produce a sensing and store it locally
  op sense ==
    store((id, seqNo););
    seqNo := seqNo + 1

  op run ==
    await start = true;
    while true do
      await seqNo < noSensings; sense(;)
      []
      await #(sendqueue) > 0; sendOrForward(;)
    end

  with Any
    op start == start := true

  with Network
    op receive(in data: [Int,Int]) ==
      await start = true;
      if ~(data in received) then // re-send if not seen before
        received := received |- data;
        store(data;)
      end
end
";

const SINK: &str = "\
class SinkNode(network: Network)
implements Node
begin
  var noStored: Int := 0;
  var received: List[[Int,Int]] := nil;
  var lastReceived: Time;

  op init ==
    lastReceived := now

  op store(in data: [Int,Int]) ==
    noStored := noStored + 1

  with Network
    op receive(in data: [Int,Int]) ==
      if (lastReceived < now) then lastReceived := now end;
      if ~(data in received) then // store if not seen before
        received := received |- data;
        store(data;)
      end
end
";

fn network(collision: &dyn CollisionBehavior) -> String {
    let mut s = String::from(
        "\
class BroadcastNetwork()
implements Network
begin
  var nodesConns: Map[Node, List[Node]] := empty();
  var lastTransmission: Time;

  op init ==
    lastTransmission := now

  with Any
    op register(in node: Node, connections: List[Node]) ==
      nodesConns := insert(nodesConns, node, connections)

  with Node
    op broadcast(in data: [Int,Int]) ==
      var rec: Node;
      var recs: List[Node] := nil;

      if caller in nodesConns then
        recs := get(nodesConns, caller)
      end;

",
    );
    if let Some(line) = collision.slot_rule() {
        writeln!(s, "      {line}").unwrap();
    }
    s.push_str(
        "      lastTransmission := now;

      while ~isempty(recs) do
        rec := head(recs);
        recs := tail(recs);
        if rec /= caller then
          !rec.receive(data)
        end
      end
end
",
    );
    s
}

fn main_class(topology: &dyn Topology) -> String {
    let mut s = String::from("class Main()\nbegin\n  var nw: Network;\n  var sink: SinkNode;\n");
    for i in 1..=SENSORS {
        writeln!(s, "  var n{i}: SensorNode;").unwrap();
    }
    s.push_str("\n  op run ==\n    nw := new BroadcastNetwork();\n    sink := new SinkNode(nw);\n");
    for i in 1..=SENSORS {
        writeln!(s, "    n{i} := new SensorNode({i}, nw, {SENSINGS});").unwrap();
    }
    let links = topology.links();
    for node in std::iter::once("sink".to_string()).chain((1..=SENSORS).map(|i| format!("n{i}"))) {
        let to = links.get(&node).map(|v| v.join(", ")).unwrap_or_default();
        let list = if to.is_empty() { "nil".to_string() } else { format!("[{to}]") };
        writeln!(s, "    nw.register({node}, {list};);").unwrap();
    }
    let starts: Vec<String> = (1..=SENSORS).map(|i| format!("!n{i}.start()")).collect();
    writeln!(s, "    {}", starts.join("; ")).unwrap();
    s.push_str("end\n");
    s
}

/// Complete model text for one collision behavior and topology.
pub fn model_text(collision: &dyn CollisionBehavior, topology: &dyn Topology) -> String {
    format!(
        "// Sensor network: {} collision behavior, {} topology.\n\n{INTERFACES}\n{SENSOR}\n{SINK}\n{}\n{}",
        collision.name(),
        topology.name(),
        network(collision),
        main_class(topology)
    )
}
