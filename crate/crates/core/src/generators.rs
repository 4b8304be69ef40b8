//! Consultation generators: the Prouhet-Thue-Morse sequence and a fair coin.
//!
//! Each agent owns one [`ConsultState`]. The PTM variant reads the sequence
//! through a private pointer; the random variant draws from a private stream
//! derived from the master seed, so no state is ever shared between agents.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The two move rules an agent can use for a step.
///
/// `Random` is encoded as `+1` and `Greedy` as `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Random,
    Greedy,
}

impl Strategy {
    #[inline]
    pub fn sign(self) -> i8 {
        match self {
            Strategy::Random => 1,
            Strategy::Greedy => -1,
        }
    }

    #[inline]
    pub fn from_sign(s: i8) -> Option<Self> {
        match s {
            1 => Some(Strategy::Random),
            -1 => Some(Strategy::Greedy),
            _ => None,
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Strategy::Random => Strategy::Greedy,
            Strategy::Greedy => Strategy::Random,
        }
    }
}

/// Term `k` (0-based) of the PTM sequence: `+1` when `k` has an even number
/// of one bits, `-1` otherwise.
#[inline]
pub fn ptm_bit(k: u64) -> Strategy {
    if k.count_ones() % 2 == 0 {
        Strategy::Random
    } else {
        Strategy::Greedy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    #[default]
    Ptm,
    Random,
}

impl GeneratorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::Ptm => "ptm",
            GeneratorKind::Random => "random",
        }
    }
}

impl std::fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ptm" => Ok(GeneratorKind::Ptm),
            "random" => Ok(GeneratorKind::Random),
            other => Err(format!("unknown generator `{other}` (expected ptm or random)")),
        }
    }
}

/// Index of the first PTM term read by a fresh consultation.
///
/// Term 0 is spent by the forced random first step, which makes an agent
/// that is unsuccessful at every step emit exactly the PTM prefix.
pub const PTM_START: u64 = 1;

/// Per-agent consultation state.
#[derive(Debug, Clone)]
pub struct ConsultState {
    kind: GeneratorKind,
    ptm_pointer: u64,
    rng: ChaCha8Rng,
    consultations: u64,
}

impl ConsultState {
    pub fn new(kind: GeneratorKind, seed: u64) -> Self {
        Self {
            kind,
            ptm_pointer: PTM_START,
            rng: ChaCha8Rng::seed_from_u64(seed),
            consultations: 0,
        }
    }

    pub fn kind(&self) -> GeneratorKind {
        self.kind
    }

    /// Next PTM index to be read. Only advances on PTM consultations.
    pub fn ptm_pointer(&self) -> u64 {
        self.ptm_pointer
    }

    pub fn consultations(&self) -> u64 {
        self.consultations
    }

    /// Asks the generator which strategy to use next.
    pub fn consult(&mut self) -> Strategy {
        self.consultations += 1;
        match self.kind {
            GeneratorKind::Ptm => {
                let s = ptm_bit(self.ptm_pointer);
                self.ptm_pointer += 1;
                s
            }
            GeneratorKind::Random => {
                if self.rng.random::<bool>() {
                    Strategy::Random
                } else {
                    Strategy::Greedy
                }
            }
        }
    }
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Folds a sequence of words into a seed. Order matters.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x9E37_79B9_7F4A_7C15, |acc, &p| {
        mix64(acc ^ mix64(p.wrapping_add(0x9E37_79B9_7F4A_7C15)))
    })
}

/// Stable 64-bit hash of a string for seed derivation (FNV-1a).
pub fn hash_str(s: &str) -> u64 {
    s.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Stream ids used when deriving per-agent seeds from a run seed.
pub mod stream {
    pub const MOVES: u64 = 1;
    pub const CONSULT: u64 = 2;
}

/// Seed for one agent's stream within a run.
pub fn agent_seed(run_seed: u64, agent: usize, stream: u64) -> u64 {
    derive_seed(&[run_seed, agent as u64, stream])
}
