#![allow(dead_code)]

pub mod decoder_oracle;
pub mod server_client;
