//! The canonical distributions used throughout: task assignment, parity,
//! binary symmetric channels and chains, copies, and the golden-ratio
//! broadcast witness.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use core::str::FromStr;

use crate::math::sqrt;
use crate::prob::{compose_channel, Alphabet, Channel, Pmf};
use crate::{Error, Result};

/// The golden ratio (√5 + 1)/2.
pub const PHI: f64 = 1.618_033_988_749_895;

/// A source pmf together with the desired conditional distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Fixture {
    pub name: String,
    pub source: Pmf,
    pub target: Channel,
}

impl Fixture {
    /// Source axes followed by target output axes.
    pub fn joint(&self) -> Pmf {
        compose_channel(&self.source, &self.target).expect("fixture axes are consistent")
    }
}

/// Parsed form of the `NAME:param` fixture mini-language.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FixtureSpec {
    Ta2(usize),
    Ta3,
    Tamt,
    Parity,
    Bsc(f64),
    UniformBinary,
    TaTriple(usize),
    Chain(f64),
    Copy(usize),
}

impl FromStr for FixtureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = match s.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (s, None),
        };
        let bad = || Error::InvalidArgument(format!("bad fixture {s:?}"));
        let int = |p: Option<&str>| {
            p.and_then(|p| p.trim().parse::<usize>().ok())
                .ok_or_else(bad)
        };
        let name = name.trim().to_ascii_uppercase();
        let spec = match name.as_str() {
            "TA2" => FixtureSpec::Ta2(int(param)?),
            "TA3" => FixtureSpec::Ta3,
            "TAMT" => FixtureSpec::Tamt,
            "PARITY" => FixtureSpec::Parity,
            "BSC" => FixtureSpec::Bsc(param.and_then(|p| p.trim().parse().ok()).ok_or_else(bad)?),
            "UNIFORM-BINARY" => FixtureSpec::UniformBinary,
            "TA-TRIPLE" => FixtureSpec::TaTriple(int(param)?),
            "CHAIN" => {
                FixtureSpec::Chain(param.and_then(|p| p.trim().parse().ok()).ok_or_else(bad)?)
            }
            "COPY" => FixtureSpec::Copy(int(param)?),
            _ => return Err(bad()),
        };
        if param.is_some()
            && matches!(
                spec,
                FixtureSpec::Ta3
                    | FixtureSpec::Tamt
                    | FixtureSpec::Parity
                    | FixtureSpec::UniformBinary
            )
        {
            return Err(bad());
        }
        Ok(spec)
    }
}

impl FixtureSpec {
    pub fn build(self) -> Result<Fixture> {
        match self {
            FixtureSpec::Ta2(k) => ta2(k),
            FixtureSpec::Ta3 => Ok(ta3()),
            FixtureSpec::Tamt => Ok(tamt()),
            FixtureSpec::Parity => Ok(parity()),
            FixtureSpec::Bsc(q) => bsc(q),
            FixtureSpec::UniformBinary => Ok(Fixture {
                name: "uniform-binary".to_string(),
                source: uniform_binary(),
                target: Channel::identity(Alphabet::range(2)),
            }),
            FixtureSpec::TaTriple(k) => {
                let joint = ta_triple(k)?;
                Ok(Fixture {
                    name: format!("TA-TRIPLE:{k}"),
                    source: joint.marginalize(&[0])?,
                    target: joint.condition(&[0])?,
                })
            }
            FixtureSpec::Chain(q) => bsc_chain(q),
            FixtureSpec::Copy(k) => copy(k),
        }
    }
}

pub fn uniform_binary() -> Pmf {
    Pmf::uniform(vec![Alphabet::range(2)]).expect("two cells")
}

/// X uniform on {1..k}; Y uniform on the other k−1 tasks.
pub fn ta2(k: usize) -> Result<Fixture> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("TA2 needs k >= 2, got {k}")));
    }
    let a = Alphabet::numbered(1, k);
    Ok(Fixture {
        name: format!("TA2:{k}"),
        source: Pmf::uniform(vec![a.clone()])?,
        target: Channel::from_fn(
            vec![a.clone()],
            vec![a],
            |x, y| if x == y { 0.0 } else { 1.0 },
        )?,
    })
}

/// Joint of TA2(k) as a single pmf over (X, Y).
pub fn ta2_joint(k: usize) -> Result<Pmf> {
    Ok(ta2(k)?.joint())
}

/// Three tasks, three nodes: (X, Y, Z) uniform over the permutations of {1,2,3}.
pub fn ta3() -> Fixture {
    let a = Alphabet::numbered(1, 3);
    Fixture {
        name: "TA3".to_string(),
        source: Pmf::uniform(vec![a.clone()]).expect("three cells"),
        target: Channel::from_fn(vec![a.clone()], vec![a.clone(), a], |x, yz| {
            let (x, y, z) = (x[0], yz[0], yz[1]);
            if x != y && y != z && x != z {
                1.0
            } else {
                0.0
            }
        })
        .expect("valid rows"),
    }
}

/// TA3 refactored for the cascade-multiterminal network: (X, Y) uniform over
/// distinct pairs, Z the remaining task.
pub fn tamt() -> Fixture {
    let a = Alphabet::numbered(1, 3);
    Fixture {
        name: "TAMT".to_string(),
        source: Pmf::from_fn(vec![a.clone(), a.clone()], |xy| {
            if xy[0] != xy[1] {
                1.0
            } else {
                0.0
            }
        })
        .expect("six cells"),
        // Rows with x = y have no mass; any valid row will do.
        target: Channel::from_fn(vec![a.clone(), a.clone()], vec![a], |xy, z| {
            let (x, y, z) = (xy[0], xy[1], z[0]);
            if x == y {
                if z == 0 {
                    1.0
                } else {
                    0.0
                }
            } else if z != x && z != y {
                1.0
            } else {
                0.0
            }
        })
        .expect("valid rows"),
    }
}

/// X uniform binary; (Y, Z) uniform over the pairs with x ⊕ y ⊕ z = 0.
pub fn parity() -> Fixture {
    let b = Alphabet::range(2);
    Fixture {
        name: "PARITY".to_string(),
        source: uniform_binary(),
        target: Channel::from_fn(vec![b.clone()], vec![b.clone(), b], |x, yz| {
            if (x[0] ^ yz[0] ^ yz[1]) == 0 {
                1.0
            } else {
                0.0
            }
        })
        .expect("valid rows"),
    }
}

/// Binary symmetric channel with crossover `q` applied to a uniform bit.
pub fn bsc(q: f64) -> Result<Fixture> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "crossover {q} outside [0, 1]"
        )));
    }
    Ok(Fixture {
        name: format!("BSC:{q}"),
        source: uniform_binary(),
        target: bsc_channel(q),
    })
}

pub fn bsc_channel(q: f64) -> Channel {
    let b = Alphabet::range(2);
    Channel::new(vec![b.clone()], vec![b], vec![1.0 - q, q, q, 1.0 - q]).expect("valid crossover")
}

/// Uniform bit X, Y = X through BSC(q), Z = Y through BSC(q): the Markov
/// chain X − Y − Z as a source and a channel to (Y, Z).
pub fn bsc_chain(q: f64) -> Result<Fixture> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!(
            "crossover {q} outside [0, 1]"
        )));
    }
    let b = Alphabet::range(2);
    let flip = |a: usize, c: usize| if a == c { 1.0 - q } else { q };
    Ok(Fixture {
        name: format!("CHAIN:{q}"),
        source: uniform_binary(),
        target: Channel::from_fn(vec![b.clone()], vec![b.clone(), b], |x, yz| {
            flip(x[0], yz[0]) * flip(yz[0], yz[1])
        })?,
    })
}

/// U uniform on k symbols, copied to X, Y and Z.
pub fn copy(k: usize) -> Result<Fixture> {
    if k == 0 {
        return Err(Error::EmptyAlphabet);
    }
    let a = Alphabet::range(k);
    Ok(Fixture {
        name: format!("COPY:{k}"),
        source: Pmf::uniform(vec![a.clone()])?,
        target: Channel::from_fn(vec![a.clone()], vec![a.clone(), a.clone(), a], |u, xyz| {
            if xyz.iter().all(|&v| v == u[0]) {
                1.0
            } else {
                0.0
            }
        })?,
    })
}

/// Uniform over ordered triples of distinct tasks from {1..k}.
pub fn ta_triple(k: usize) -> Result<Pmf> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "TA-TRIPLE needs k >= 3, got {k}"
        )));
    }
    let a = Alphabet::numbered(1, k);
    Pmf::from_fn(vec![a.clone(), a.clone(), a], |t| {
        if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
            1.0
        } else {
            0.0
        }
    })
}

/// P(U = u | X = x) of the golden-ratio construction: 1/√5 on the diagonal,
/// 1/(φ√5) elsewhere.
pub fn golden_ratio_u_given_x() -> Channel {
    let a = Alphabet::numbered(1, 3);
    let s5 = sqrt(5.0);
    Channel::from_fn(vec![a.clone()], vec![Alphabet::range(3)], |x, u| {
        if x[0] == u[0] {
            1.0 / s5
        } else {
            1.0 / (PHI * s5)
        }
    })
    .expect("rows sum to one")
}

/// Default-task actions around U: Y sits at U+1 and Z at U−1 (mod 3), each
/// stepping onto U when X claims its default. `mirror` swaps the two sides.
fn default_tasks(x: usize, u: usize, mirror: bool) -> (usize, usize) {
    let (up, down) = ((u + 1) % 3, (u + 2) % 3);
    let (dy, dz) = if mirror { (down, up) } else { (up, down) };
    let y = if x == dy { u } else { dy };
    let z = if x == dz { u } else { dz };
    (y, z)
}

/// Joint over (X, U, Y, Z) of the unsymmetrized golden-ratio construction.
pub fn golden_ratio_joint() -> Pmf {
    let a = Alphabet::numbered(1, 3);
    let ux = golden_ratio_u_given_x();
    Pmf::from_fn(vec![a.clone(), Alphabet::range(3), a.clone(), a], |c| {
        let (x, u, y, z) = (c[0], c[1], c[2], c[3]);
        if default_tasks(x, u, false) == (y, z) {
            ux.row(x)[u] / 3.0
        } else {
            0.0
        }
    })
    .expect("valid joint")
}

/// Golden-ratio auxiliary for TA3 as a channel p(u|x,y,z).
///
/// The bare construction does not induce the uniform TA3 conditional, so U
/// also carries a fair time-sharing bit choosing the construction or its
/// mirror image: U = (T, U'), indexed `3·T + U'`. The mixture is exactly TA3
/// and the rates are unchanged.
pub fn golden_ratio_witness() -> Channel {
    let a = Alphabet::numbered(1, 3);
    let ux = golden_ratio_u_given_x();
    let joint = Pmf::from_fn(vec![a.clone(), a.clone(), a, Alphabet::range(6)], |c| {
        let (x, y, z, u) = (c[0], c[1], c[2], c[3]);
        let (t, u) = (u / 3, u % 3);
        if default_tasks(x, u, t == 1) == (y, z) {
            ux.row(x)[u]
        } else {
            0.0
        }
    })
    .expect("valid joint");
    joint.condition(&[0, 1, 2]).expect("axes in range")
}
