#![allow(dead_code)]

pub mod gen;
pub mod golden;
pub mod graph;
pub mod oracle;
pub mod tag_oracle;
