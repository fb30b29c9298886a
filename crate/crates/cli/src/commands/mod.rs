pub mod distill;
pub mod evaluate;
pub mod inpaint;
pub mod report;
