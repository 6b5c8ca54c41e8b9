pub mod fd;
pub mod fit;
pub mod linalg;
pub mod quad;
pub mod roots;
