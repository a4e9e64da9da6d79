pub mod basis;
pub mod bohr;
pub mod criteria;
pub mod error;
pub mod exec;
pub mod io;
pub mod moment;
pub mod primes;
pub mod scalar;
pub mod series;
pub mod tail;
