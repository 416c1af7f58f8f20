use crate::error::{Error, Result};

/// Largest number of grid points accepted.
pub const MAX_GRID_POINTS: usize = 10_000;

/// Parses `start:end:step` (end inclusive), a comma list, or a single value.
pub fn parse_k_grid(text: &str) -> Result<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Validation("empty k grid".into()));
    }
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| Error::Validation(format!("invalid k value {:?} in grid {text:?}", s.trim())))
    };
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let (start, end, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => {
                return Err(Error::Validation(format!(
                    "k grid {text:?} is not start:end or start:end:step"
                )))
            }
        };
        if step == 0 || start > end {
            return Err(Error::Validation(format!(
                "k grid {text:?} needs start <= end and a positive step"
            )));
        }
        let gaps = (end - start) / step;
        if gaps >= MAX_GRID_POINTS {
            return Err(Error::Validation(format!(
                "k grid {text:?} has more than {MAX_GRID_POINTS} points"
            )));
        }
        return Ok((start..=end).step_by(step).collect());
    }
    let grid: Vec<usize> = text.split(',').map(num).collect::<Result<_>>()?;
    if grid.len() > MAX_GRID_POINTS {
        return Err(Error::Validation(format!(
            "k grid has {} points (limit {MAX_GRID_POINTS})",
            grid.len()
        )));
    }
    Ok(grid)
}
