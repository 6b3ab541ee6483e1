use ratsplit::{Error, PrimeField, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Table,
}

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct Config {
    pub field: PrimeField,
    pub seed: u64,
    pub max_retries: u32,
    pub format: Format,
}

impl Config {
    pub fn new(prime: u64, seed: u64, max_retries: u32, format: Format) -> Result<Self> {
        Ok(Config {
            field: PrimeField::new(prime)?,
            seed,
            max_retries,
            format,
        })
    }

    /// Degrees that reach linear algebra must stay below `p`.
    pub fn check_degree(&self, what: &str, d: i64) -> Result<()> {
        let p = self.field.modulus();
        if d >= 0 && d as u64 >= p {
            return Err(Error::Modulus(format!("{what} = {d} is not below p = {p}")));
        }
        Ok(())
    }
}
