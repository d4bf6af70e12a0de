pub mod compose;
pub mod estimate;
pub mod evaluate;
pub mod generate;
pub mod mine;
pub mod oracle;
pub mod report;
pub mod sample;
