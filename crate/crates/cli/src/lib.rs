//! Command-line front end of `ailfem-core`: configuration, per-step CSV
//! records, JSON summaries and mesh dumps.

pub mod config;
pub mod mesh_dump;
pub mod records;
pub mod run;
pub mod summary;
