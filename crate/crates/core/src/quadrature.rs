//! Adaptive Gauss-Kronrod quadrature of log-space integrands.
//!
//! Evidence integrands are exp of N-scale log quantities and are extremely
//! peaked for N ≈ 100, so the integrator works on ℓ(x) = ln f(x): a probe
//! pass locates the running maximum m, the rule sums exp(ℓ − m), and the
//! result is returned as m + ln Σ. Semi-infinite ranges are mapped through
//! r = tan θ.

/// 15-point Gauss-Kronrod abscissae (positive half, descending).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_64,
    0.949_107_912_342_758_52,
    0.864_864_423_359_769_07,
    0.741_531_185_599_394_44,
    0.586_087_235_467_691_13,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_47,
    0.0,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_41,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_83,
];

/// Embedded 7-point Gauss weights (for XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_39,
];

/// Result of a log-space integration.
#[derive(Debug, Clone, Copy)]
pub struct LogQuad {
    /// Natural log of the integral value.
    pub log_value: f64,
    /// Estimated relative error of the (linear-scale) integral. This is also
    /// the absolute error estimate of `log_value` for small errors.
    pub rel_err: f64,
    /// Number of integrand evaluations.
    pub evals: usize,
    /// Whether the error estimate met the requested tolerance.
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    integral: f64,
    error: f64,
}

/// QUADPACK's error rescaling: inflates the raw |K − G| difference on
/// panels where the integrand varies wildly (endpoint singularities left by
/// the tangent map), so the estimator is not fooled there.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

/// One GK15 application to exp(ℓ(x) − shift) on [a, b]. The returned
/// `max_ell` lets the caller detect that the probe missed the peak badly
/// enough to overflow the shifted exponential.
fn gk15<F: Fn(f64) -> f64>(
    ell: &F,
    shift: f64,
    a: f64,
    b: f64,
    evals: &mut usize,
) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut max_ell = f64::NEG_INFINITY;
    let mut fv = [0.0f64; 15];
    let mut eval = |x: f64, max_ell: &mut f64| -> f64 {
        let l = ell(x);
        if l > *max_ell {
            *max_ell = l;
        }
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            (l - shift).min(690.0).exp()
        }
    };
    let fc = eval(center, &mut max_ell);
    fv[14] = fc;
    *evals += 15;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut res_abs = fc.abs() * WGK[7];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dx = half * x;
        let f1 = eval(center - dx, &mut max_ell);
        let f2 = eval(center + dx, &mut max_ell);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        kronrod += WGK[i] * (f1 + f2);
        res_abs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (f1 + f2);
        }
    }
    let mean = kronrod * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        res_asc += WGK[i] * ((fv[2 * i] - mean).abs() + (fv[2 * i + 1] - mean).abs());
    }
    let integral = kronrod * half;
    let err = rescale_error((kronrod - gauss) * half, res_abs * half.abs(), res_asc * half.abs());
    (integral, err, max_ell)
}

/// Adaptive integration of exp(ℓ(x)) over [a, b], returning log(∫).
///
/// `initial` controls the uniform pre-subdivision (peaked integrands need the
/// probe grid to see the peak); refinement bisects the worst segment until
/// the summed error estimate is below `rel_tol` times the integral.
pub fn integrate_log<F: Fn(f64) -> f64>(ell: F, a: f64, b: f64, rel_tol: f64, initial: usize) -> LogQuad {
    let initial = initial.max(4);
    let mut evals = 0usize;

    // Probe pass for the max shift.
    let probes = (initial * 8).max(257);
    let mut shift = f64::NEG_INFINITY;
    for i in 0..=probes {
        let x = a + (b - a) * (i as f64) / (probes as f64);
        let l = ell(x);
        evals += 1;
        if l.is_finite() && l > shift {
            shift = l;
        }
    }
    if shift == f64::NEG_INFINITY {
        // Integrand is identically zero at probe resolution.
        return LogQuad {
            log_value: f64::NEG_INFINITY,
            rel_err: 0.0,
            evals,
            converged: true,
        };
    }

    // If refinement uncovers values far above the probe max, the shift moves
    // up and every stored panel rescales by exp(old − new); nothing needs
    // re-evaluation because the shift enters multiplicatively.
    let mut reshift = |segments: &mut Vec<Segment>, shift: &mut f64, max_ell: f64| {
        if max_ell > *shift + 600.0 {
            let factor = (*shift - max_ell).exp();
            for s in segments.iter_mut() {
                s.integral *= factor;
                s.error *= factor;
            }
            *shift = max_ell;
            true
        } else {
            false
        }
    };

    let mut segments: Vec<Segment> = Vec::with_capacity(2 * initial);
    for i in 0..initial {
        let sa = a + (b - a) * (i as f64) / (initial as f64);
        let sb = a + (b - a) * ((i + 1) as f64) / (initial as f64);
        let (mut integral, mut error, max_ell) = gk15(&ell, shift, sa, sb, &mut evals);
        if reshift(&mut segments, &mut shift, max_ell) {
            let redo = gk15(&ell, shift, sa, sb, &mut evals);
            integral = redo.0;
            error = redo.1;
        }
        segments.push(Segment {
            a: sa,
            b: sb,
            integral,
            error,
        });
    }

    const MAX_SEGMENTS: usize = 4000;
    loop {
        let total: f64 = segments.iter().map(|s| s.integral).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        if total > 0.0 && err <= rel_tol * total.abs() {
            return LogQuad {
                log_value: shift + total.ln(),
                rel_err: err / total,
                evals,
                converged: true,
            };
        }
        if segments.len() >= MAX_SEGMENTS {
            let log_value = if total > 0.0 {
                shift + total.ln()
            } else {
                f64::NEG_INFINITY
            };
            return LogQuad {
                log_value,
                rel_err: if total > 0.0 { err / total } else { f64::INFINITY },
                evals,
                converged: false,
            };
        }
        // Split the worst segment.
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Segment { a: sa, b: sb, .. } = segments.swap_remove(worst);
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            // Interval exhausted at f64 resolution; keep its estimate but
            // stop it from dominating the refinement queue.
            let (integral, error, _) = gk15(&ell, shift, sa, sb, &mut evals);
            segments.push(Segment {
                a: sa,
                b: sb,
                integral,
                error: error * 1e-6,
            });
            continue;
        }
        for (la, lb) in [(sa, mid), (mid, sb)] {
            let (mut integral, mut error, max_ell) = gk15(&ell, shift, la, lb, &mut evals);
            if reshift(&mut segments, &mut shift, max_ell) {
                let redo = gk15(&ell, shift, la, lb, &mut evals);
                integral = redo.0;
                error = redo.1;
            }
            segments.push(Segment {
                a: la,
                b: lb,
                integral,
                error,
            });
        }
    }
}

/// log ∫₀^∞ exp(ℓ(r)) dr via the squared-tangent map r = tan²θ.
///
/// Squaring the tangent keeps algebraic tails as slow as r^{−3/2} bounded
/// after mapping (a plain tangent map leaves a (π/2−θ)^{−1/2} endpoint
/// singularity and loses ~1e-8 of such a tail to f64 angle resolution).
pub fn integrate_log_halfline<F: Fn(f64) -> f64>(ell: F, rel_tol: f64) -> LogQuad {
    let mapped = |theta: f64| -> f64 {
        let c = theta.cos();
        let t = theta.tan();
        if c <= 0.0 || !t.is_finite() || t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let r = t * t;
        if !r.is_finite() {
            return f64::NEG_INFINITY;
        }
        let l = ell(r);
        if l == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            // dr = 2 tanθ sec²θ dθ
            l + std::f64::consts::LN_2 + t.ln() - 2.0 * c.ln()
        }
    };
    integrate_log(mapped, 0.0, std::f64::consts::FRAC_PI_2, rel_tol, 64)
}
