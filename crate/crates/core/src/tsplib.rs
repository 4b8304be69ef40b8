//! TSPLIB instance ingestion (`EUC_2D` only) and the problem complexity metric.
//!
//! Distances follow the TSPLIB `nint` convention: the Euclidean distance is
//! rounded half-up to the nearest integer. The full distance matrix is
//! materialized when the instance is built.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use thiserror::Error;

/// A city of an instance. `id` is the 1-based identifier from the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct City {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl City {
    pub fn new(id: usize, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }
}

#[derive(Debug, Error)]
pub enum TsplibError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: unsupported EDGE_WEIGHT_TYPE `{kind}` (only EUC_2D is supported)")]
    UnsupportedWeightType { line: usize, kind: String },
    #[error("line {line}: unsupported TYPE `{kind}` (only TSP is supported)")]
    UnsupportedType { line: usize, kind: String },
    #[error("line {line}: expected {expected} coordinates, found {found}")]
    CoordinateCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: non-numeric coordinate `{token}`")]
    NonNumeric { line: usize, token: String },
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Rounded Euclidean distance between two cities (TSPLIB `nint`).
pub fn euc2d_distance(a: &City, b: &City) -> u32 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    ((dx * dx + dy * dy).sqrt() + 0.5).floor() as u32
}

/// A parsed, immutable instance with its eagerly built distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    name: String,
    cities: Vec<City>,
    dist: Vec<u32>,
    d_max: u32,
}

impl Problem {
    /// Builds an instance from coordinates, computing all pairwise distances.
    pub fn from_cities(name: impl Into<String>, cities: Vec<City>) -> Self {
        let n = cities.len();
        let mut dist = vec![0u32; n * n];
        let mut d_max = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euc2d_distance(&cities[i], &cities[j]);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
                d_max = d_max.max(d);
            }
        }
        Self {
            name: name.into(),
            cities,
            dist,
            d_max,
        }
    }

    /// Builds an instance directly from a symmetric integer matrix given
    /// row-major. Coordinates are left at the origin; used for synthetic
    /// instances whose metric is not Euclidean.
    pub fn from_matrix(name: impl Into<String>, n: usize, dist: Vec<u32>) -> Result<Self, TsplibError> {
        if dist.len() != n * n {
            return Err(TsplibError::Degenerate(format!(
                "matrix has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        for i in 0..n {
            if dist[i * n + i] != 0 {
                return Err(TsplibError::Degenerate(format!("non-zero diagonal at {}", i + 1)));
            }
            for j in (i + 1)..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(TsplibError::Degenerate(format!(
                        "asymmetric entry ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        let d_max = dist.iter().copied().max().unwrap_or(0);
        let cities = (1..=n).map(|id| City::new(id, 0.0, 0.0)).collect();
        Ok(Self {
            name: name.into(),
            cities,
            dist,
            d_max,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.cities.len()
    }

    pub fn cities(&self) -> &[City] {
        &self.cities
    }

    /// Distance between 0-based city indices.
    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> u32 {
        self.dist[i * self.cities.len() + j]
    }

    /// Row `i` of the distance matrix (0-based).
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        let n = self.cities.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    /// Writes the instance back out in TSPLIB form. Coordinates use the
    /// shortest representation that round-trips.
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME : {}", self.name);
        let _ = writeln!(out, "TYPE : TSP");
        let _ = writeln!(out, "DIMENSION : {}", self.n());
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for c in &self.cities {
            let _ = writeln!(out, "{} {} {}", c.id, c.x, c.y);
        }
        out.push_str("EOF\n");
        out
    }
}

/// Reads and parses a TSPLIB file from disk.
pub fn read_tsplib(path: impl AsRef<Path>) -> Result<Problem, TsplibError> {
    let file = std::fs::File::open(path.as_ref())?;
    parse_tsplib(std::io::BufReader::new(file))
}

/// Parses a TSPLIB `EUC_2D` instance. Coordinates are kept in file order.
pub fn parse_tsplib<R: BufRead>(source: R) -> Result<Problem, TsplibError> {
    let mut name: Option<String> = None;
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut cities: Vec<City> = Vec::new();
    let mut in_coords = false;
    let mut last_line = 0;
    let mut section_line = 0;

    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "EOF" {
            break;
        }

        if in_coords {
            let mut parts = trimmed.split_whitespace();
            // A keyword after the coordinate block ends it.
            let first = parts.next().unwrap_or_default();
            if first.chars().next().is_some_and(|c| c.is_ascii_alphabetic()) {
                return Err(TsplibError::Malformed {
                    line: line_no,
                    msg: format!("unexpected section `{first}` after NODE_COORD_SECTION"),
                });
            }
            let id: usize = first.parse().map_err(|_| TsplibError::NonNumeric {
                line: line_no,
                token: first.to_string(),
            })?;
            let mut coord = || -> Result<f64, TsplibError> {
                let tok = parts.next().ok_or_else(|| TsplibError::Malformed {
                    line: line_no,
                    msg: "coordinate line needs `id x y`".into(),
                })?;
                tok.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| TsplibError::NonNumeric {
                        line: line_no,
                        token: tok.to_string(),
                    })
            };
            let x = coord()?;
            let y = coord()?;
            if parts.next().is_some() {
                return Err(TsplibError::Malformed {
                    line: line_no,
                    msg: "trailing tokens after `id x y`".into(),
                });
            }
            if cities.iter().any(|c| c.id == id) {
                return Err(TsplibError::Malformed {
                    line: line_no,
                    msg: format!("duplicate city id {id}"),
                });
            }
            if let Some(dim) = dimension {
                if cities.len() == dim {
                    return Err(TsplibError::CoordinateCount {
                        line: line_no,
                        expected: dim,
                        found: dim + 1,
                    });
                }
            }
            cities.push(City::new(id, x, y));
            continue;
        }

        if trimmed == "NODE_COORD_SECTION" {
            section_line = line_no;
            let Some(_) = dimension else {
                return Err(TsplibError::Malformed {
                    line: line_no,
                    msg: "NODE_COORD_SECTION before DIMENSION".into(),
                });
            };
            match weight_type.as_deref() {
                Some("EUC_2D") => {}
                Some(_) => unreachable!("rejected when the header was read"),
                None => {
                    return Err(TsplibError::Malformed {
                        line: line_no,
                        msg: "missing EDGE_WEIGHT_TYPE".into(),
                    })
                }
            }
            in_coords = true;
            continue;
        }

        let Some((key, value)) = trimmed.split_once(':') else {
            return Err(TsplibError::Malformed {
                line: line_no,
                msg: format!("expected `KEY : VALUE`, found `{trimmed}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "NAME" => name = Some(value.to_string()),
            "TYPE" => {
                if value != "TSP" {
                    return Err(TsplibError::UnsupportedType {
                        line: line_no,
                        kind: value.to_string(),
                    });
                }
            }
            "DIMENSION" => {
                let dim = value.parse().map_err(|_| TsplibError::Malformed {
                    line: line_no,
                    msg: format!("invalid DIMENSION `{value}`"),
                })?;
                dimension = Some(dim);
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(TsplibError::UnsupportedWeightType {
                        line: line_no,
                        kind: value.to_string(),
                    });
                }
                weight_type = Some(value.to_string());
            }
            "COMMENT" | "NODE_COORD_TYPE" | "DISPLAY_DATA_TYPE" => {}
            other => {
                return Err(TsplibError::Malformed {
                    line: line_no,
                    msg: format!("unknown header key `{other}`"),
                })
            }
        }
    }

    if !in_coords {
        return Err(TsplibError::Malformed {
            line: last_line.max(1),
            msg: "missing NODE_COORD_SECTION".into(),
        });
    }
    let dim = dimension.expect("checked at NODE_COORD_SECTION");
    if cities.len() != dim {
        return Err(TsplibError::CoordinateCount {
            line: last_line.max(section_line),
            expected: dim,
            found: cities.len(),
        });
    }
    Ok(Problem::from_cities(name.unwrap_or_default(), cities))
}

/// Problem complexity: the quadratic trace of the `d_max`-normalized distance
/// matrix divided by `n^2`.
///
/// For a symmetric matrix the sum of squared eigenvalues equals the squared
/// Frobenius norm, so no eigendecomposition is needed.
pub fn problem_complexity(p: &Problem) -> Result<f64, TsplibError> {
    let n = p.n();
    if n < 2 {
        return Err(TsplibError::Degenerate(format!("need at least 2 cities, got {n}")));
    }
    if p.d_max() == 0 {
        return Err(TsplibError::Degenerate("all cities coincide (d_max = 0)".into()));
    }
    // Exact integer ratio, reduced so that scaling every distance by the same
    // factor yields bitwise the same result.
    let sum_sq: u128 = p.dist.iter().map(|&d| u128::from(d) * u128::from(d)).sum();
    let d_max_sq = u128::from(p.d_max()) * u128::from(p.d_max());
    let g = gcd(sum_sq, d_max_sq);
    Ok((sum_sq / g) as f64 / (d_max_sq / g) as f64 / (n * n) as f64)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
