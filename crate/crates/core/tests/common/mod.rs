#![allow(dead_code)]

use std::path::PathBuf;

use tcreol_core::desugar::desugar;
use tcreol_core::{init_configuration, parse, Configuration, Program, SourceModel};

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

/// Every `.tcreol` file shipped in `models/`, sorted by name.
pub fn bundled_models() -> Vec<(String, SourceModel)> {
    let mut out: Vec<_> = std::fs::read_dir(models_dir())
        .expect("models directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "tcreol"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, SourceModel::from_file(&p).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn program(text: &str) -> Program {
    parse(&SourceModel::inline(text)).unwrap_or_else(|e| panic!("{e}"))
}

pub fn config(text: &str, limit: u64) -> Configuration {
    init_configuration(&desugar(&program(text)), limit).unwrap()
}

pub fn model_config(name: &str, limit: u64) -> Configuration {
    let src = SourceModel::from_file(&models_dir().join(format!("{name}.tcreol"))).unwrap();
    init_configuration(&desugar(&parse(&src).unwrap()), limit).unwrap()
}
