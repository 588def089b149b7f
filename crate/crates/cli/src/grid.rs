use std::fmt;
use std::str::FromStr;

/// Values given either as `a:b:steps` (inclusive, evenly spaced) or as a
/// comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [a, b, steps] => {
                let a = parse_f64(a)?;
                let b = parse_f64(b)?;
                let steps: usize = steps
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad step count {steps:?}"))?;
                match steps {
                    0 => return Err("step count must be positive".into()),
                    1 => vec![a],
                    _ => (0..steps)
                        .map(|i| a + (b - a) * i as f64 / (steps - 1) as f64)
                        .collect(),
                }
            }
            [list] => list.split(',').map(parse_f64).collect::<Result<_, _>>()?,
            _ => return Err(format!("expected a:b:steps or a comma list, got {s:?}")),
        };
        if values.is_empty() {
            return Err("empty grid".into());
        }
        Ok(Grid(values))
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("bad number {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

/// Perturbation order: an integer or `full`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    K(usize),
    Full,
}

impl Order {
    pub fn as_usize(self) -> usize {
        match self {
            Order::K(k) => k,
            Order::Full => usize::MAX,
        }
    }
}

impl FromStr for Order {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(Order::Full);
        }
        s.parse().map(Order::K).map_err(|_| format!("bad order {s:?}"))
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::K(k) => write!(f, "k{k}"),
            Order::Full => f.write_str("full"),
        }
    }
}

/// Integer range `a:b` or `a:b:step`, inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Range(pub Vec<usize>);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let nums: Vec<usize> = s
            .split(':')
            .map(|p| p.trim().parse().map_err(|_| format!("bad integer {p:?}")))
            .collect::<Result<_, _>>()?;
        let (a, b, step) = match nums.as_slice() {
            [a, b] => (*a, *b, 1),
            [a, b, step] => (*a, *b, *step),
            _ => return Err(format!("expected a:b or a:b:step, got {s:?}")),
        };
        if step == 0 || a > b {
            return Err(format!("empty range {s:?}"));
        }
        Ok(Range((a..=b).step_by(step).collect()))
    }
}

/// Comma-separated list.
pub fn list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    let v: Vec<T> = s
        .split(',')
        .map(|p| p.trim().parse::<T>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err("empty list".into());
    }
    Ok(v)
}
