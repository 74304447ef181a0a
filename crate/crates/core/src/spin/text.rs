//! Text form: `L` lines of `+`/`-`, top line is row `L-1`.

use std::fmt;
use std::str::FromStr;

use super::SpinConfiguration;
use crate::error::Error;
use crate::lattice::TorusGeometry;

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in (0..self.side()).rev() {
            for i in 0..self.side() {
                f.write_str(if self.get(i, j) { "+" } else { "-" })?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

impl FromStr for SpinConfiguration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let lines: Vec<&str> = s.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
        let l = lines.len();
        let g = TorusGeometry::new(l)?;
        let mut out = SpinConfiguration::all_minus(&g);
        for (k, line) in lines.iter().enumerate() {
            let j = l - 1 - k;
            if line.chars().count() != l {
                return Err(Error::Parse(format!("line {} has {} columns, expected {l}", k + 1, line.chars().count())));
            }
            for (i, ch) in line.chars().enumerate() {
                match ch {
                    '+' => out.set(i, j, true),
                    '-' => {}
                    other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
                }
            }
        }
        Ok(out)
    }
}
