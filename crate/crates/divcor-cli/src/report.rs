//! Report types and rendering for the divcor command line tool.
//!
//! Every subcommand builds one serializable report, then renders it in one
//! of three formats: human text, JSON (one object per run, carrying every
//! field of the underlying result), or CSV (one row per grid point, fixed
//! header). Rationals and integers wider than 64 bits travel as decimal
//! strings so downstream tools can re-verify exactness; a convenience f64
//! rides along where it helps plotting.

use std::io::{self, Write};

use divcor_core::correl::CorrelationRun;
use divcor_core::singular::{CConstant, Mismatch, MismatchKind, SingularSeriesResult};
use divcor_core::{ratio_to_f64, BigRational};
use serde::Serialize;

/// An exact rational plus its nearest-f64 view.
#[derive(Debug, Serialize)]
pub struct RationalDto {
    pub numerator: String,
    pub denominator: String,
    pub decimal: f64,
}

impl RationalDto {
    pub fn new(r: &BigRational) -> Self {
        RationalDto {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
            decimal: ratio_to_f64(r),
        }
    }

    fn fraction(&self) -> String {
        format!("{}/{}", self.numerator, self.denominator)
    }
}

/// One report per run. JSON rendering comes from the Serialize impl; the
/// human and CSV shapes are written out by hand so they stay stable and
/// documentable.
pub trait Report: Serialize {
    fn human(&self, w: &mut dyn Write) -> io::Result<()>;
    fn csv(&self, w: &mut dyn Write) -> io::Result<()>;
}

fn prime_shift_note(w: &mut dyn Write, h: u64) -> io::Result<()> {
    writeln!(
        w,
        "  note: h = {h} is prime, outside the composite-shift scope of the\n  main-term conjecture; all quantities are still well defined"
    )
}

#[derive(Debug, Serialize)]
pub struct ConstantReport {
    pub k: u32,
    pub l: u32,
    pub tol: f64,
    pub sign_mode: String,
    pub value: f64,
    pub tail_bound: f64,
    pub prime_cutoff: u64,
}

impl ConstantReport {
    pub fn new(k: u32, l: u32, tol: f64, sign_mode: &str, c: &CConstant) -> Self {
        ConstantReport {
            k,
            l,
            tol,
            sign_mode: sign_mode.to_owned(),
            value: c.value,
            tail_bound: c.tail_bound,
            prime_cutoff: c.prime_cutoff,
        }
    }
}

impl Report for ConstantReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "singular series constant C for k={}, l={} (sign mode: {})",
            self.k, self.l, self.sign_mode
        )?;
        writeln!(w, "  value:        {}", self.value)?;
        writeln!(w, "  tail bound:   {:e}", self.tail_bound)?;
        writeln!(w, "  prime cutoff: {}", self.prime_cutoff)
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "k,l,tol,sign_mode,value,tail_bound,prime_cutoff")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            self.k, self.l, self.tol, self.sign_mode, self.value, self.tail_bound, self.prime_cutoff
        )
    }
}

/// Exact local data at one prime dividing h, in both forms.
#[derive(Debug, Serialize)]
pub struct LocalFactorRow {
    pub p: u64,
    pub alpha: u32,
    pub c_rf: RationalDto,
    pub c_ngthom: RationalDto,
    pub f_rf: RationalDto,
    pub f_ngthom: RationalDto,
}

#[derive(Debug, Serialize)]
pub struct LocalFactorReport {
    pub k: u32,
    pub l: u32,
    pub h: u64,
    pub h_is_prime: bool,
    pub sign_mode: String,
    pub f_rf: RationalDto,
    pub f_ngthom: RationalDto,
    pub forms_agree: bool,
    pub primes: Vec<LocalFactorRow>,
}

impl Report for LocalFactorReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "local factor f(h) for k={}, l={}, h={} (sign mode: {})",
            self.k, self.l, self.h, self.sign_mode
        )?;
        writeln!(
            w,
            "  rf form:      {} (~{})",
            self.f_rf.fraction(),
            self.f_rf.decimal
        )?;
        writeln!(
            w,
            "  ng-thom form: {} (~{})",
            self.f_ngthom.fraction(),
            self.f_ngthom.decimal
        )?;
        writeln!(
            w,
            "  forms agree:  {}",
            if self.forms_agree { "yes" } else { "no" }
        )?;
        if self.h_is_prime {
            prime_shift_note(w, self.h)?;
        }
        if !self.primes.is_empty() {
            writeln!(w, "  per-prime factors:")?;
            for row in &self.primes {
                writeln!(
                    w,
                    "    p={} alpha={}: c_rf={} c_ngthom={} f_rf={} f_ngthom={}",
                    row.p,
                    row.alpha,
                    row.c_rf.fraction(),
                    row.c_ngthom.fraction(),
                    row.f_rf.fraction(),
                    row.f_ngthom.fraction()
                )?;
            }
        }
        Ok(())
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "k,l,h,p,alpha,c_rf_numerator,c_rf_denominator,c_rf_decimal,\
             c_ngthom_numerator,c_ngthom_denominator,c_ngthom_decimal,\
             f_rf_numerator,f_rf_denominator,f_rf_decimal,\
             f_ngthom_numerator,f_ngthom_denominator,f_ngthom_decimal"
        )?;
        for row in &self.primes {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                self.k,
                self.l,
                self.h,
                row.p,
                row.alpha,
                row.c_rf.numerator,
                row.c_rf.denominator,
                row.c_rf.decimal,
                row.c_ngthom.numerator,
                row.c_ngthom.denominator,
                row.c_ngthom.decimal,
                row.f_rf.numerator,
                row.f_rf.denominator,
                row.f_rf.decimal,
                row.f_ngthom.numerator,
                row.f_ngthom.denominator,
                row.f_ngthom.decimal
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct SingularReport {
    pub k: u32,
    pub l: u32,
    pub h: u64,
    pub h_is_prime: bool,
    pub tol: f64,
    pub q_max: u64,
    pub sign_mode: String,
    pub c_truncated: f64,
    pub c_tail_bound: f64,
    pub prime_cutoff: u64,
    pub f_exact: RationalDto,
    pub b_euler: f64,
    pub b_qsum: f64,
    pub abs_gap: f64,
}

impl SingularReport {
    pub fn new(
        tol: f64,
        q_max: u64,
        sign_mode: &str,
        series: &SingularSeriesResult,
        b_qsum: f64,
        h_is_prime: bool,
    ) -> Self {
        SingularReport {
            k: series.k,
            l: series.l,
            h: series.h,
            h_is_prime,
            tol,
            q_max,
            sign_mode: sign_mode.to_owned(),
            c_truncated: series.c_truncated,
            c_tail_bound: series.c_tail_bound,
            prime_cutoff: series.prime_cutoff,
            f_exact: RationalDto::new(&series.f_exact),
            b_euler: series.b,
            b_qsum,
            abs_gap: (series.b - b_qsum).abs(),
        }
    }
}

impl Report for SingularReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "singular series B(h) for k={}, l={}, h={} (sign mode: {})",
            self.k, self.l, self.h, self.sign_mode
        )?;
        writeln!(
            w,
            "  C truncated:  {} (tail bound {:e}, prime cutoff {})",
            self.c_truncated, self.c_tail_bound, self.prime_cutoff
        )?;
        writeln!(
            w,
            "  f(h) exact:   {} (~{})",
            self.f_exact.fraction(),
            self.f_exact.decimal
        )?;
        writeln!(w, "  B via Euler:  {}", self.b_euler)?;
        writeln!(w, "  B via q-sum:  {} (q <= {})", self.b_qsum, self.q_max)?;
        writeln!(w, "  |difference|: {:e}", self.abs_gap)?;
        if self.h_is_prime {
            prime_shift_note(w, self.h)?;
        }
        Ok(())
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "k,l,h,h_is_prime,tol,q_max,sign_mode,c_truncated,c_tail_bound,prime_cutoff,\
             f_numerator,f_denominator,f_decimal,b_euler,b_qsum,abs_gap"
        )?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.k,
            self.l,
            self.h,
            self.h_is_prime,
            self.tol,
            self.q_max,
            self.sign_mode,
            self.c_truncated,
            self.c_tail_bound,
            self.prime_cutoff,
            self.f_exact.numerator,
            self.f_exact.denominator,
            self.f_exact.decimal,
            self.b_euler,
            self.b_qsum,
            self.abs_gap
        )
    }
}

#[derive(Debug, Serialize)]
pub struct PredictReport {
    pub k: u32,
    pub l: u32,
    pub h: u64,
    pub h_is_prime: bool,
    pub x: f64,
    pub tol: f64,
    pub sign_mode: String,
    pub c_truncated: f64,
    pub c_tail_bound: f64,
    pub f_exact: RationalDto,
    pub b: f64,
    pub predicted: f64,
}

impl Report for PredictReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "predicted main term for k={}, l={}, h={} at X={} (sign mode: {})",
            self.k, self.l, self.h, self.x, self.sign_mode
        )?;
        writeln!(
            w,
            "  B(h):      {} (C ~ {}, f(h) = {})",
            self.b,
            self.c_truncated,
            self.f_exact.fraction()
        )?;
        writeln!(w, "  predicted: {:e}", self.predicted)?;
        if self.h_is_prime {
            prime_shift_note(w, self.h)?;
        }
        Ok(())
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "k,l,h,h_is_prime,x,tol,sign_mode,c_truncated,c_tail_bound,\
             f_numerator,f_denominator,f_decimal,b,predicted"
        )?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.k,
            self.l,
            self.h,
            self.h_is_prime,
            self.x,
            self.tol,
            self.sign_mode,
            self.c_truncated,
            self.c_tail_bound,
            self.f_exact.numerator,
            self.f_exact.denominator,
            self.f_exact.decimal,
            self.b,
            self.predicted
        )
    }
}

#[derive(Debug, Serialize)]
pub struct CorrelateRow {
    pub x: u64,
    /// Exact integer sum, as a decimal string.
    pub empirical: String,
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Debug, Serialize)]
pub struct CorrelateReport {
    pub k: u32,
    pub l: u32,
    pub h: u64,
    pub h_is_prime: bool,
    pub tol: f64,
    pub sign_mode: String,
    pub rows: Vec<CorrelateRow>,
    pub deviation_at_x_min: f64,
    pub deviation_at_x_max: f64,
    pub trend_improved: bool,
}

impl CorrelateReport {
    pub fn new(
        k: u32,
        l: u32,
        h: u64,
        tol: f64,
        sign_mode: &str,
        run: &CorrelationRun,
        h_is_prime: bool,
    ) -> Self {
        CorrelateReport {
            k,
            l,
            h,
            h_is_prime,
            tol,
            sign_mode: sign_mode.to_owned(),
            rows: run
                .reports
                .iter()
                .map(|r| CorrelateRow {
                    x: r.x,
                    empirical: r.empirical.to_string(),
                    predicted: r.predicted,
                    ratio: r.ratio,
                })
                .collect(),
            deviation_at_x_min: run.deviation_at_x_min,
            deviation_at_x_max: run.deviation_at_x_max,
            trend_improved: run.trend_improved(),
        }
    }
}

impl Report for CorrelateReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "shifted divisor correlation for k={}, l={}, h={} (sign mode: {})",
            self.k, self.l, self.h, self.sign_mode
        )?;
        writeln!(
            w,
            "  {:>12} {:>20} {:>16} {:>8}",
            "X", "empirical", "predicted", "ratio"
        )?;
        for row in &self.rows {
            writeln!(
                w,
                "  {:>12} {:>20} {:>16.6e} {:>8.4}",
                row.x, row.empirical, row.predicted, row.ratio
            )?;
        }
        writeln!(
            w,
            "  |ratio - 1|: {:.5} at the smallest X, {:.5} at the largest ({})",
            self.deviation_at_x_min,
            self.deviation_at_x_max,
            if self.trend_improved {
                "improving"
            } else {
                "not improving"
            }
        )?;
        if self.h_is_prime {
            prime_shift_note(w, self.h)?;
        }
        Ok(())
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "k,l,h,x,empirical,predicted,ratio")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.k, self.l, self.h, row.x, row.empirical, row.predicted, row.ratio
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct CarmichaelReport {
    pub q1: u64,
    pub q2: u64,
    pub x: u64,
    pub h: u64,
    /// Exact integer sum, as a decimal string.
    pub sum: String,
    pub average: f64,
    /// The orthogonality limit of the average: c_q(h) when q1 = q2, else 0.
    pub reference: f64,
    pub abs_gap: f64,
}

impl Report for CarmichaelReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "Ramanujan sum correlation for q1={}, q2={}, X={}, h={}",
            self.q1, self.q2, self.x, self.h
        )?;
        writeln!(w, "  sum:             {}", self.sum)?;
        writeln!(w, "  average (sum/X): {}", self.average)?;
        if self.q1 == self.q2 {
            writeln!(
                w,
                "  reference:       {} = c_q(h) for equal moduli",
                self.reference
            )?;
        } else {
            writeln!(w, "  reference:       0 (distinct moduli are orthogonal)")?;
        }
        writeln!(w, "  |gap|:           {:e}", self.abs_gap)
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "q1,q2,x,h,sum,average,reference,abs_gap")?;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            self.q1, self.q2, self.x, self.h, self.sum, self.average, self.reference, self.abs_gap
        )
    }
}

#[derive(Debug, Serialize)]
pub struct MismatchRow {
    pub k: u32,
    pub l: u32,
    pub p: u64,
    /// None for a C-factor mismatch, the prime exponent of h otherwise.
    pub alpha: Option<u32>,
    pub kind: String,
    pub rf: RationalDto,
    pub ng_thom: RationalDto,
}

impl MismatchRow {
    pub fn new(m: &Mismatch) -> Self {
        MismatchRow {
            k: m.k,
            l: m.l,
            p: m.p,
            alpha: m.alpha,
            kind: match m.kind {
                MismatchKind::CFactor => "c-factor".to_owned(),
                MismatchKind::FFactor => "f-factor".to_owned(),
            },
            rf: RationalDto::new(&m.rf),
            ng_thom: RationalDto::new(&m.ng_thom),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TheoremReport {
    pub k_max: u32,
    pub l_max: u32,
    pub prime_count: usize,
    pub alpha_max: u32,
    pub sign_mode: String,
    pub checks: u64,
    pub mismatch_count: usize,
    pub mismatches: Vec<MismatchRow>,
}

impl Report for TheoremReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "checked {} local factor identities over k,l <= {},{}; {} primes; alpha <= {} \
             (sign mode: {}): {} mismatches",
            self.checks,
            self.k_max,
            self.l_max,
            self.prime_count,
            self.alpha_max,
            self.sign_mode,
            self.mismatch_count
        )?;
        const SHOWN: usize = 10;
        for row in self.mismatches.iter().take(SHOWN) {
            match row.alpha {
                Some(alpha) => writeln!(
                    w,
                    "  k={} l={} p={} alpha={} {}: rf={} ng-thom={}",
                    row.k,
                    row.l,
                    row.p,
                    alpha,
                    row.kind,
                    row.rf.fraction(),
                    row.ng_thom.fraction()
                )?,
                None => writeln!(
                    w,
                    "  k={} l={} p={} {}: rf={} ng-thom={}",
                    row.k,
                    row.l,
                    row.p,
                    row.kind,
                    row.rf.fraction(),
                    row.ng_thom.fraction()
                )?,
            }
        }
        if self.mismatches.len() > SHOWN {
            writeln!(
                w,
                "  ... {} more; the json and csv formats list all of them",
                self.mismatches.len() - SHOWN
            )?;
        }
        Ok(())
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "k,l,p,alpha,kind,rf_numerator,rf_denominator,ngthom_numerator,ngthom_denominator"
        )?;
        for row in &self.mismatches {
            let alpha = row.alpha.map_or(String::new(), |a| a.to_string());
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                row.k,
                row.l,
                row.p,
                alpha,
                row.kind,
                row.rf.numerator,
                row.rf.denominator,
                row.ng_thom.numerator,
                row.ng_thom.denominator
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct RfCoeffRow {
    pub q: u64,
    pub mult_part: RationalDto,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct RfCoeffReport {
    pub k: u32,
    pub q_max: u64,
    pub sign_mode: String,
    pub rows: Vec<RfCoeffRow>,
}

impl Report for RfCoeffReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "RF expansion coefficients a_q for k={}, q <= {} (sign mode: {})",
            self.k, self.q_max, self.sign_mode
        )?;
        writeln!(w, "  {:>8} {:>16} {:>24}", "q", "mult part", "value")?;
        for row in &self.rows {
            writeln!(
                w,
                "  {:>8} {:>16} {:>24}",
                row.q,
                row.mult_part.fraction(),
                row.value
            )?;
        }
        Ok(())
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "k,q,mult_numerator,mult_denominator,value")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.k, row.q, row.mult_part.numerator, row.mult_part.denominator, row.value
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize)]
pub struct ReconstructRow {
    pub q_max: u64,
    pub partial_sum: f64,
}

#[derive(Debug, Serialize)]
pub struct ReconstructReport {
    pub k: u32,
    pub n: u64,
    pub q_max: u64,
    pub sign_mode: String,
    pub tau_exact: u64,
    pub rows: Vec<ReconstructRow>,
}

impl Report for ReconstructReport {
    fn human(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(
            w,
            "truncated RF reconstruction of tau_{}({}) (sign mode: {})",
            self.k, self.n, self.sign_mode
        )?;
        writeln!(w, "  exact value: {}", self.tau_exact)?;
        writeln!(w, "  {:>8} {:>24}", "Q", "partial sum")?;
        for row in &self.rows {
            writeln!(w, "  {:>8} {:>24}", row.q_max, row.partial_sum)?;
        }
        writeln!(
            w,
            "  note: the expansion converges only conditionally; this table is a\n  diagnostic, not an approximation with a guarantee"
        )
    }

    fn csv(&self, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "k,n,q_max,partial_sum,tau_exact")?;
        for row in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                self.k, self.n, row.q_max, row.partial_sum, self.tau_exact
            )?;
        }
        Ok(())
    }
}
