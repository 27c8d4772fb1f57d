pub mod kuratowski;
