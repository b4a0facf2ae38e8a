//! Gram sweeps with parallel column preparation.

use std::collections::BTreeSet;
use std::io::Write;

use grhcot_core::cotsum::{c_from_ratio, c_ratio_with_tables, cache_key, CValueCache, CotTables};
use grhcot_core::gram::{GramSweepState, SweepRecord};
use grhcot_core::{Discriminant, PrecisionContext, Result};
use rayon::prelude::*;

/// A sweep state together with the cotangent tables its columns reuse.
pub struct SweepDriver {
    state: GramSweepState,
    tables: CotTables,
}

impl SweepDriver {
    pub fn new(d: Discriminant) -> Self {
        Self {
            state: GramSweepState::new(d),
            tables: CotTables::new(d.modulus()),
        }
    }

    pub fn state(&self) -> &GramSweepState {
        &self.state
    }

    pub fn records(&self) -> &[SweepRecord] {
        self.state.records()
    }

    /// Column `c_{m,N}`, `m = 1..=N`. Missing cache entries are computed in
    /// parallel and inserted in key order, so the result is independent of
    /// the thread count.
    pub fn column(&mut self, size: usize, cache: &mut CValueCache, ctx: &PrecisionContext) -> Result<Vec<f64>> {
        let d = self.state.discriminant();
        let keys = (1..=size as u64)
            .map(|m| cache_key(d, m, size as u64))
            .collect::<Result<Vec<_>>>()?;
        let missing: BTreeSet<_> = keys.iter().map(|(k, _)| *k).filter(|k| cache.get(k).is_none()).collect();
        for k in &missing {
            ctx.charge(d.modulus() * (k.p + k.q), f64::NAN)?;
            self.tables.ensure(k.p);
            self.tables.ensure(k.q);
        }
        let step = self.state.step();
        let tables = &self.tables;
        let fresh: Vec<(_, f64)> = missing
            .par_iter()
            .map(|k| {
                let a = tables.get(k.p).unwrap_or(&[]);
                let b = tables.get(k.q).unwrap_or(&[]);
                (*k, c_ratio_with_tables(step, k.p, k.q, a, b))
            })
            .collect();
        for (k, v) in fresh {
            cache.insert(k, v);
            cache.record_miss();
        }
        let mut col = Vec::with_capacity(size);
        let mut first = missing;
        for (k, ell) in &keys {
            let v = cache.get(k).expect("filled above");
            // the first request of each fresh key was the miss
            if !first.remove(k) {
                cache.record_hit();
            }
            col.push(c_from_ratio(*k, *ell, v));
        }
        Ok(col)
    }

    pub fn extend(&mut self, upto: usize, cache: &mut CValueCache, ctx: &PrecisionContext) -> Result<()> {
        for size in self.state.size() + 1..=upto {
            let col = self.column(size, cache, ctx)?;
            self.state.push_column(&col)?;
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "N,R,dist2,logdetC";

/// Floats use Rust's shortest round-trip formatting.
pub fn write_csv(records: &[SweepRecord], out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{},{},{},{}", r.n, r.r, r.dist2, r.log_det_c)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_matches_serial() {
        let d = Discriminant::MINUS_4;
        let ctx = PrecisionContext::default();
        let mut serial = GramSweepState::new(d);
        let mut c1 = CValueCache::new();
        serial.extend(96, &mut c1, &ctx).unwrap();
        let mut par = SweepDriver::new(d);
        let mut c2 = CValueCache::new();
        par.extend(96, &mut c2, &ctx).unwrap();
        for (a, b) in serial.records().iter().zip(par.records()) {
            assert_eq!(a.r.to_bits(), b.r.to_bits());
            assert_eq!(a.log_det_c.to_bits(), b.log_det_c.to_bits());
        }
        assert_eq!(c1.misses(), c2.misses());
        assert_eq!(c1.hits(), c2.hits());
    }
}
