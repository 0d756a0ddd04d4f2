fn main() {
    for (a, b, z) in [(2.5f64, 2.5f64, 25.0f64), (0.5, 0.5, 25.0), (1.5, 1.5, 25.0), (3.5, 3.5, 25.0)] {
        let r = rprior_core::specfun::log_u(a, b, z).unwrap();
        println!("U({a},{b},{z}): log={} terms={} conv={} branch={:?}", r.log_value, r.terms_used, r.converged, r.branch);
    }
}
