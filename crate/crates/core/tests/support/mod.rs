pub mod naive_fec;
