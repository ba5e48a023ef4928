//! Algorithms producing `(n, d)` with `0 < n`, `|d| < √k` and
//! `n·y ≡ d·x (mod k)`, which gives the k-ary reduction coefficients
//! `a = −d`, `b = n`.
//!
//! All `√k` comparisons are integer comparisons on squares.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::numerics::{gcd_u64, mod_div, Modulus};

/// Position of a residue relative to `A_k = ]0,√k[` and `B_k = ]k−√k,k[`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    InA,
    InB,
    Outside,
}

impl Region {
    /// Member of `U_k = A_k ∪ B_k`.
    pub fn in_u(self) -> bool {
        self != Region::Outside
    }
}

/// Range test only; coprimality is not checked.
pub fn classify(x: u64, m: &Modulus) -> Region {
    let k = m.k();
    if x == 0 || x >= k {
        Region::Outside
    } else if m.below_sqrt(x) {
        Region::InA
    } else if m.below_sqrt(k - x) {
        Region::InB
    } else {
        Region::Outside
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReductionPair {
    pub n: i64,
    pub d: i64,
}

impl ReductionPair {
    pub fn new(n: i64, d: i64) -> Self {
        ReductionPair { n, d }
    }

    /// Checks the output contract against the original inputs.
    pub fn satisfies_contract(&self, x: u64, y: u64, m: &Modulus) -> bool {
        let k = m.k() as i128;
        let bounds = self.n > 0 && m.below_sqrt(self.n as u64) && self.d != 0 && m.below_sqrt(self.d.unsigned_abs());
        let lhs = (self.n as i128 * (y as i128 % k)).rem_euclid(k);
        let rhs = (self.d as i128 * (x as i128 % k)).rem_euclid(k);
        bounds && lhs == rhs
    }
}

impl fmt::Display for ReductionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.d)
    }
}

/// Which branch produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Path {
    /// `T(a, b)` on the input residues.
    DirectTOnPair,
    /// Continued-fraction loop seeded with `c = x/y mod k`.
    LoopOnC,
    /// `T(c, 1)` with `c ∈ U_k`, equal to the loop's result after at most
    /// one iteration.
    DirectTOnC,
    /// `T(1, s)` with `s = y/x mod k`.
    DirectTOnS,
    /// Continued-fraction loop seeded with `s`, components swapped afterwards.
    LoopOnS,
}

impl Path {
    pub fn as_str(self) -> &'static str {
        match self {
            Path::DirectTOnPair => "direct-t-on-pair",
            Path::LoopOnC => "loop-on-c",
            Path::DirectTOnC => "direct-t-on-c",
            Path::DirectTOnS => "direct-t-on-s",
            Path::LoopOnS => "loop-on-s",
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub iterations: usize,
    pub loop_avoided: bool,
    pub path: Path,
    /// Partial quotients `⌊n₁/n₂⌋`, one per loop iteration.
    pub quotients: Vec<u64>,
}

impl ReductionTrace {
    fn direct(path: Path) -> Self {
        ReductionTrace {
            iterations: 0,
            loop_avoided: true,
            path,
            quotients: Vec::new(),
        }
    }

    fn from_loop(path: Path, quotients: Vec<u64>) -> Self {
        ReductionTrace {
            iterations: quotients.len(),
            loop_avoided: quotients.is_empty(),
            path,
            quotients,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub pair: ReductionPair,
    pub trace: ReductionTrace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RaceMode {
    /// Both loops advance alternately on one thread; deterministic.
    #[default]
    Lockstep,
    /// Two worker threads; the first to finish cancels the other.
    Concurrent,
}

impl FromStr for RaceMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lockstep" => Ok(RaceMode::Lockstep),
            "concurrent" => Ok(RaceMode::Concurrent),
            other => Err(format!("unknown race mode `{other}`")),
        }
    }
}

/// Selects the reduction used as a k-ary GCD inner step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Jwa,
    Res,
    Pares(RaceMode),
}

impl Algorithm {
    pub fn reduce(self, x: u64, y: u64, m: &Modulus) -> Result<Reduction> {
        match self {
            Algorithm::Jwa => jwa(x, y, m),
            Algorithm::Res => res(x, y, m),
            Algorithm::Pares(mode) => pares(x, y, m, mode),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Jwa => "jwa",
            Algorithm::Res => "res",
            Algorithm::Pares(_) => "pares",
        }
    }
}

/// Four-case T-transformation on `U_k × U_k`.
pub fn t_transform(x: u64, y: u64, m: &Modulus) -> Result<ReductionPair> {
    let k = m.k() as i64;
    let (xi, yi) = (x as i64, y as i64);
    let pair = match (classify(x, m), classify(y, m)) {
        (Region::InA, Region::InA) => ReductionPair::new(xi, yi),
        (Region::InA, Region::InB) => ReductionPair::new(xi, yi - k),
        (Region::InB, Region::InA) => ReductionPair::new(k - xi, -yi),
        (Region::InB, Region::InB) => ReductionPair::new(k - xi, k - yi),
        (Region::Outside, _) => return Err(Error::InvalidRegion { value: x, k: m.k() }),
        (_, Region::Outside) => return Err(Error::InvalidRegion { value: y, k: m.k() }),
    };
    Ok(pair)
}

/// State of the truncated extended Euclid loop on `f₁ = (k, 0)`,
/// `f₂ = (seed, 1)`.
#[derive(Debug, Clone)]
struct RatModLoop {
    n1: u64,
    d1: i64,
    n2: u64,
    d2: i64,
    quotients: Vec<u64>,
}

impl RatModLoop {
    fn new(seed: u64, m: &Modulus) -> Self {
        RatModLoop {
            n1: m.k(),
            d1: 0,
            n2: seed,
            d2: 1,
            quotients: Vec::new(),
        }
    }

    /// Exit test `n₂ < √k`.
    #[inline]
    fn finished(&self, m: &Modulus) -> bool {
        m.below_sqrt(self.n2)
    }

    /// `f₁ := f₁ − ⌊n₁/n₂⌋·f₂; swap(f₁, f₂)`
    #[inline]
    fn step(&mut self) {
        let q = self.n1 / self.n2;
        let n = self.n1 - q * self.n2;
        // |d| never exceeds k, which fits in i64.
        let d = self.d1 - (q as i64) * self.d2;
        self.n1 = self.n2;
        self.d1 = self.d2;
        self.n2 = n;
        self.d2 = d;
        self.quotients.push(q);
    }

    /// Runs to completion, or returns `None` once `cancel` is raised.
    fn run(mut self, m: &Modulus, cancel: Option<&AtomicBool>) -> Option<Self> {
        while !self.finished(m) {
            if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                return None;
            }
            self.step();
        }
        Some(self)
    }

    fn into_reduction(self) -> Reduction {
        Reduction {
            pair: ReductionPair::new(self.n2 as i64, self.d2),
            trace: ReductionTrace::from_loop(Path::LoopOnC, self.quotients),
        }
    }

    /// Result for a loop seeded with `s = y/x`: the components are swapped
    /// and the sign normalized so that `n > 0`.
    fn into_swapped_reduction(self) -> Reduction {
        let (mut n, mut d) = (self.d2, self.n2 as i64);
        if n < 0 {
            n = -n;
            d = -d;
        }
        Reduction {
            pair: ReductionPair::new(n, d),
            trace: ReductionTrace::from_loop(Path::LoopOnS, self.quotients),
        }
    }
}

/// Number of loop iterations the JWA performs on seed `c`, without
/// allocating a trace.
pub fn jwa_iterations(c: u64, m: &Modulus) -> u32 {
    let (mut n1, mut n2) = (m.k(), c);
    let mut iterations = 0;
    while !m.below_sqrt(n2) {
        // small quotients dominate; avoid the divide when possible
        let mut r = n1 - n2;
        if r >= n2 {
            r -= n2;
            if r >= n2 {
                r %= n2;
            }
        }
        n1 = n2;
        n2 = r;
        iterations += 1;
    }
    iterations
}

/// Residues of `x`, `y` modulo `k` after checking coprimality.
fn unit_residues(x: u64, y: u64, m: &Modulus) -> Result<(u64, u64)> {
    let k = m.k();
    if x == 0 || y == 0 {
        return Err(Error::Precondition("x and y must be positive"));
    }
    let (a, b) = (x % k, y % k);
    if gcd_u64(a, k) != 1 {
        return Err(Error::not_coprime(x, k));
    }
    if gcd_u64(b, k) != 1 {
        return Err(Error::not_coprime(y, k));
    }
    Ok((a, b))
}

/// The Jebelean–Weber reduction: `c = x/y mod k`, then the truncated
/// continued-fraction loop on `(k, 0), (c, 1)` until `n₂ < √k`.
pub fn jwa(x: u64, y: u64, m: &Modulus) -> Result<Reduction> {
    let (a, b) = unit_residues(x, y, m)?;
    let c = mod_div(a, b, m)?;
    let done = RatModLoop::new(c, m).run(m, None).expect("no cancellation");
    Ok(done.into_reduction())
}

/// Residual algorithm: `T(a, b)` when both residues lie in `U_k`, `T(c, 1)`
/// when `c = a/b mod k` does, otherwise the JWA loop on `c`.
pub fn res(x: u64, y: u64, m: &Modulus) -> Result<Reduction> {
    let (a, b) = unit_residues(x, y, m)?;
    if let Some(direct) = direct_on_pair(a, b, m) {
        return Ok(direct);
    }
    match c_start(a, b, m)? {
        Start::Direct(r) => Ok(r),
        Start::Loop(l) => Ok(l.run(m, None).expect("no cancellation").into_reduction()),
    }
}

/// Residual algorithm on `s = y/x mod k`. `T(1, s)` is returned as is when
/// `s ∈ U_k`; the loop branch swaps `(n, d)` afterwards.
pub fn res_swapped(x: u64, y: u64, m: &Modulus) -> Result<Reduction> {
    let (a, b) = unit_residues(x, y, m)?;
    match s_start(a, b, m)? {
        Start::Direct(r) => Ok(r),
        Start::Loop(l) => Ok(l.run(m, None).expect("no cancellation").into_swapped_reduction()),
    }
}

fn direct_on_pair(a: u64, b: u64, m: &Modulus) -> Option<Reduction> {
    if classify(a, m).in_u() && classify(b, m).in_u() {
        let pair = t_transform(a, b, m).expect("both residues are in U_k");
        Some(Reduction {
            pair,
            trace: ReductionTrace::direct(Path::DirectTOnPair),
        })
    } else {
        None
    }
}

enum Start {
    Direct(Reduction),
    Loop(RatModLoop),
}

/// `T(c, 1)` if `c = a/b mod k` lies in `U_k`, else a loop seeded with `c`.
fn c_start(a: u64, b: u64, m: &Modulus) -> Result<Start> {
    let c = mod_div(a, b, m)?;
    if classify(c, m).in_u() {
        let pair = t_transform(c, 1, m)?;
        Ok(Start::Direct(Reduction {
            pair,
            trace: ReductionTrace::direct(Path::DirectTOnC),
        }))
    } else {
        Ok(Start::Loop(RatModLoop::new(c, m)))
    }
}

/// `T(1, s)` if `s = b/a mod k` lies in `U_k`, else a loop seeded with `s`.
fn s_start(a: u64, b: u64, m: &Modulus) -> Result<Start> {
    let s = mod_div(b, a, m)?;
    if classify(s, m).in_u() {
        let pair = t_transform(1, s, m)?;
        Ok(Start::Direct(Reduction {
            pair,
            trace: ReductionTrace::direct(Path::DirectTOnS),
        }))
    } else {
        Ok(Start::Loop(RatModLoop::new(s, m)))
    }
}

/// Parallel residual algorithm: `T(a, b)` when both residues lie in `U_k`,
/// otherwise [`res`] races [`res_swapped`] and the first finisher wins.
pub fn pares(x: u64, y: u64, m: &Modulus, mode: RaceMode) -> Result<Reduction> {
    let (a, b) = unit_residues(x, y, m)?;
    if let Some(direct) = direct_on_pair(a, b, m) {
        return Ok(direct);
    }
    // s-side first, as in every lockstep round
    let s_side = match s_start(a, b, m)? {
        Start::Direct(r) => return Ok(r),
        Start::Loop(l) => l,
    };
    let c_side = match c_start(a, b, m)? {
        Start::Direct(r) => return Ok(r),
        Start::Loop(l) => l,
    };
    Ok(match mode {
        RaceMode::Lockstep => race_lockstep(c_side, s_side, m),
        RaceMode::Concurrent => race_concurrent(c_side, s_side, m),
    })
}

/// Each round tests the s-side exit, then the c-side exit, then advances
/// both loops by one iteration. Ties go to the s-side.
fn race_lockstep(mut c_side: RatModLoop, mut s_side: RatModLoop, m: &Modulus) -> Reduction {
    loop {
        if s_side.finished(m) {
            return s_side.into_swapped_reduction();
        }
        if c_side.finished(m) {
            return c_side.into_reduction();
        }
        s_side.step();
        c_side.step();
    }
}

fn race_concurrent(c_side: RatModLoop, s_side: RatModLoop, m: &Modulus) -> Reduction {
    let cancel = AtomicBool::new(false);
    let winner: OnceLock<Reduction> = OnceLock::new();
    std::thread::scope(|scope| {
        let (cancel, winner) = (&cancel, &winner);
        scope.spawn(move || {
            if let Some(done) = s_side.run(m, Some(cancel)) {
                if winner.set(done.into_swapped_reduction()).is_ok() {
                    cancel.store(true, Ordering::Relaxed);
                }
            }
        });
        scope.spawn(move || {
            if let Some(done) = c_side.run(m, Some(cancel)) {
                if winner.set(done.into_reduction()).is_ok() {
                    cancel.store(true, Ordering::Relaxed);
                }
            }
        });
    });
    winner
        .into_inner()
        .expect("a loop that is not cancelled always terminates")
}
