#![allow(dead_code)]

pub mod conservation;
pub mod iotables;
pub mod reference;
