//! Exact values by enumerating coalitions of endogenous facts.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::aggregates::{aggregate_sorted, check_schema, AggregateFunction, AggregateQuery};
use crate::cq::ConjunctiveQuery;
use crate::error::{Error, Result};
use crate::exec;
use crate::model::{Constant, Database, Fact, Provenance, Rational};
use crate::shapley::{shapley_coefficients, Score, SumKVector};

pub const DEFAULT_CAP: usize = 20;
const HARD_CAP: usize = 40;

/// The brute-force cap: `SHAPQ_CAP` when set, else 20.
pub fn default_cap() -> usize {
    std::env::var("SHAPQ_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

pub type TauFn<'a> = dyn Fn(&[Constant]) -> Result<Rational> + Sync + 'a;

/// The coalition game of an aggregate query. Every homomorphism is compiled
/// to the bitmask of endogenous facts it needs, so evaluating a coalition
/// is a subset test per answer.
pub struct Game {
    alpha: AggregateFunction,
    players: Vec<Fact>,
    values: Vec<Rational>,
    needs: Vec<Vec<u64>>,
    base: Rational,
}

impl Game {
    pub fn new(a: &AggregateQuery, d: &Database, cap: usize) -> Result<Game> {
        let tau = a.tau.clone();
        Game::with_tau(&a.alpha, &a.query, &move |t: &[Constant]| tau.eval(t), d, cap)
    }

    pub fn with_tau(
        alpha: &AggregateFunction,
        q: &ConjunctiveQuery,
        tau: &TauFn<'_>,
        d: &Database,
        cap: usize,
    ) -> Result<Game> {
        check_schema(q, d)?;
        let players = d.endogenous();
        let n = players.len();
        if n > cap.min(HARD_CAP) {
            return Err(Error::InstanceTooLarge { n, cap: cap.min(HARD_CAP) });
        }
        let index: BTreeMap<&Fact, usize> = players.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let mut lineage: BTreeMap<Vec<Constant>, BTreeSet<u64>> = BTreeMap::new();
        q.for_each_homomorphism(d, |b, image| {
            let mut mask = 0u64;
            for (f, p) in image {
                if *p == Provenance::Endogenous {
                    mask |= 1 << index[f];
                }
            }
            let t = q
                .full_tuple(b)
                .into_iter()
                .map(|c| c.unwrap_or_else(|| Constant::int(0)))
                .collect();
            lineage.entry(t).or_default().insert(mask);
        });
        let mut rows = Vec::with_capacity(lineage.len());
        for (t, masks) in lineage {
            let minimal: Vec<u64> = masks
                .iter()
                .copied()
                .filter(|&m| !masks.iter().any(|&o| o != m && o & m == o))
                .collect();
            rows.push((tau(&t)?, minimal));
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let (values, needs): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
        let mut game = Game {
            alpha: alpha.clone(),
            players,
            values,
            needs,
            base: Rational::zero(),
        };
        game.base = game.value(0);
        Ok(game)
    }

    pub fn players(&self) -> &[Fact] {
        &self.players
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    pub fn index_of(&self, f: &Fact) -> Option<usize> {
        self.players.iter().position(|p| p == f)
    }

    /// A(Dˣ ∪ C) for the coalition C given as a bitmask over `players`.
    pub fn value(&self, mask: u64) -> Rational {
        let present: Vec<&Rational> = self
            .values
            .iter()
            .zip(&self.needs)
            .filter(|(_, ms)| ms.iter().any(|&m| m & !mask == 0))
            .map(|(v, _)| v)
            .collect();
        aggregate_sorted(&self.alpha, &present)
    }

    /// ν(C) = A(C ∪ Dˣ) − A(Dˣ).
    pub fn nu(&self, mask: u64) -> Rational {
        self.value(mask) - &self.base
    }

    pub fn sumk(&self) -> SumKVector {
        let n = self.n();
        let acc = exec::fold_range(
            0..1u64 << n,
            || vec![Rational::zero(); n + 1],
            |mut acc, mask| {
                let v = self.value(mask);
                if !v.is_zero() {
                    acc[mask.count_ones() as usize] += v;
                }
                acc
            },
            add_vectors,
        );
        SumKVector(acc)
    }

    /// Marginal contributions of player i grouped by coalition size.
    fn marginals_by_size(&self, i: usize) -> Vec<Rational> {
        let n = self.n();
        let low = (1u64 << i) - 1;
        exec::fold_range(
            0..1u64 << (n - 1),
            || vec![Rational::zero(); n],
            |mut acc, rest| {
                let c = (rest & low) | ((rest & !low) << 1);
                let diff = self.nu(c | (1 << i)) - self.nu(c);
                if !diff.is_zero() {
                    acc[c.count_ones() as usize] += diff;
                }
                acc
            },
            add_vectors,
        )
    }

    pub fn score(&self, i: usize, score: Score) -> Rational {
        let n = self.n();
        let by_size = self.marginals_by_size(i);
        match score {
            Score::Shapley => {
                let q = shapley_coefficients(n);
                by_size.iter().zip(&q).fold(Rational::zero(), |acc, (m, qk)| acc + m * qk)
            }
            Score::Banzhaf => {
                let total = by_size.iter().fold(Rational::zero(), |acc, m| acc + m);
                total / Rational::from_integer((num_bigint::BigInt::from(1)) << (n - 1))
            }
        }
    }

    pub fn shapley(&self, i: usize) -> Rational {
        self.score(i, Score::Shapley)
    }

    /// Values of every player, evaluating each coalition once.
    pub fn all(&self, score: Score) -> Vec<Rational> {
        let n = self.n();
        if n == 0 {
            return Vec::new();
        }
        let masks: Vec<u64> = (0..1u64 << n).collect();
        let table = exec::map(&masks, |&m| self.nu(m));
        let q = shapley_coefficients(n);
        let players: Vec<usize> = (0..n).collect();
        exec::map(&players, |&i| {
            let bit = 1u64 << i;
            let mut by_size = vec![Rational::zero(); n];
            for c in 0..1u64 << n {
                if c & bit == 0 {
                    let diff = &table[(c | bit) as usize] - &table[c as usize];
                    if !diff.is_zero() {
                        by_size[c.count_ones() as usize] += diff;
                    }
                }
            }
            match score {
                Score::Shapley => by_size.iter().zip(&q).fold(Rational::zero(), |acc, (m, qk)| acc + m * qk),
                Score::Banzhaf => {
                    by_size.iter().fold(Rational::zero(), |acc, m| acc + m)
                        / Rational::from_integer(num_bigint::BigInt::from(1) << (n - 1))
                }
            }
        })
    }
}

fn add_vectors(mut a: Vec<Rational>, b: Vec<Rational>) -> Vec<Rational> {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += y;
        }
    }
    a
}

fn player_index(game: &Game, d: &Database, f: &Fact) -> Result<usize> {
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    Ok(game.index_of(f).expect("endogenous fact is a player"))
}

pub fn shapley_bruteforce(a: &AggregateQuery, d: &Database, f: &Fact) -> Result<Rational> {
    shapley_bruteforce_capped(a, d, f, default_cap())
}

pub fn shapley_bruteforce_capped(a: &AggregateQuery, d: &Database, f: &Fact, cap: usize) -> Result<Rational> {
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    let game = Game::new(a, d, cap)?;
    Ok(game.shapley(player_index(&game, d, f)?))
}

pub fn banzhaf_bruteforce(a: &AggregateQuery, d: &Database, f: &Fact) -> Result<Rational> {
    if !d.is_endogenous(f) {
        return Err(Error::FactNotEndogenous(f.to_string()));
    }
    let game = Game::new(a, d, default_cap())?;
    Ok(game.score(player_index(&game, d, f)?, Score::Banzhaf))
}

pub fn sumk_bruteforce(a: &AggregateQuery, d: &Database) -> Result<SumKVector> {
    Ok(Game::new(a, d, default_cap())?.sumk())
}

/// Scores of every endogenous fact.
pub fn bruteforce_all(a: &AggregateQuery, d: &Database, score: Score, cap: usize) -> Result<BTreeMap<Fact, Rational>> {
    let game = Game::new(a, d, cap)?;
    Ok(game.players().iter().cloned().zip(game.all(score)).collect())
}
