pub mod hw;
pub mod model;
pub mod report;
pub mod sim;
pub mod sw;
pub mod time;
pub mod workload;
