pub mod archivist;
pub mod cli;
pub mod combat;
pub mod engine;
pub mod episode;
pub mod llm;
pub mod narrator;
pub mod prompts;
pub mod react;
pub mod service;
pub mod state;
pub mod v1;
pub mod v2;
