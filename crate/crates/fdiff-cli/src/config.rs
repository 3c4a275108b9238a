//! Configuration precedence: command-line flags, then `FDIFF_`-prefixed
//! environment variables, then `fdiff.toml` in the working directory, then
//! built-in defaults.

use std::path::Path;

use fdiff_core::functor::CheckParams;
use serde::Deserialize;

#[derive(Debug, Clone)]
pub struct Config {
    pub seed: u64,
    pub bound: usize,
}

#[derive(Deserialize, Default, Debug)]
struct FileConfig {
    seed: Option<u64>,
    bound: Option<usize>,
}

impl Config {
    pub fn load(flag_seed: Option<u64>, flag_bound: Option<usize>) -> Config {
        Self::load_from(flag_seed, flag_bound, Path::new("fdiff.toml"))
    }

    pub fn load_from(
        flag_seed: Option<u64>,
        flag_bound: Option<usize>,
        file: &Path,
    ) -> Config {
        let mut seed = fdiff_core::DEFAULT_SEED;
        let mut bound = 3usize;
        if let Ok(text) = std::fs::read_to_string(file) {
            if let Ok(cfg) = toml::from_str::<FileConfig>(&text) {
                if let Some(s) = cfg.seed {
                    seed = s;
                }
                if let Some(b) = cfg.bound {
                    bound = b;
                }
            }
        }
        if let Ok(s) = std::env::var("FDIFF_SEED") {
            if let Ok(s) = parse_seed(&s) {
                seed = s;
            }
        }
        if let Ok(b) = std::env::var("FDIFF_BOUND") {
            if let Ok(b) = b.trim().parse() {
                bound = b;
            }
        }
        if let Some(s) = flag_seed {
            seed = s;
        }
        if let Some(b) = flag_bound {
            bound = b;
        }
        Config { seed, bound }
    }

    pub fn check_params(&self) -> CheckParams {
        CheckParams {
            bound: self.bound,
            seed: self.seed,
            ..Default::default()
        }
    }
}

fn parse_seed(s: &str) -> Result<u64, std::num::ParseIntError> {
    let s = s.trim();
    if let Some(hex) = s.strip_prefix("0x") {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    }
}
