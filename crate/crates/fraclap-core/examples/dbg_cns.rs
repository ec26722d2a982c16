fn main() {
    use fraclap_core::*;
    use fraclap_core::kernels::{normalization_constant, KernelConstants};
    use fraclap_core::operator::evaluate;
    // closed form: C_{n,s} = s 4^s Gamma(n/2+s) / (pi^{n/2} Gamma(1-s))
    let cf = |n: f64, s: f64| {
        s * libm::pow(4.0, s) * libm::tgamma(n / 2.0 + s)
            / (libm::pow(core::f64::consts::PI, n / 2.0) * libm::tgamma(1.0 - s))
    };
    for n in 1..=3u32 {
        for s in [0.25, 0.5, 0.75] {
            let params = FracParams::new(n, s, None, None).unwrap();
            let quad = QuadSpec::default_for_spacing(0.01);
            let c = normalization_constant(&params, &quad).unwrap();
            let want = cf(n as f64, s);
            println!("C({n},{s}) = {c:.12e}  closed {want:.12e}  rel {:.2e}", (c-want).abs()/want);
        }
    }
    // cos symbol: (-Δ)^s cos(x1) at 0 = 1
    for (n, s) in [(1u32, 0.3f64), (1, 0.7), (2, 0.3)] {
        let params = FracParams::new(n, s, None, None).unwrap();
        let quad = QuadSpec::default_for_spacing(0.01).with_tol(1e-3);
        let consts = KernelConstants::compute(&params, &quad).unwrap();
        let half = 4.0;
        let nodes = if n == 1 { 2001 } else { 601 };
        let grid = Grid::sample_symmetric(n as usize, half, nodes, |p| libm::cos(p.get(0))).unwrap();
        let ext = Exterior::expression("cos(x1)", 0.0).unwrap();
        let u = Field::new(grid, ext, false, &params).unwrap();
        let q2 = QuadSpec::default_for_spacing(u.grid().min_spacing()).with_tol(1e-3);
        let t0 = std::time::Instant::now();
        match evaluate(&u, Point::zero(n as usize), &params, &consts, &q2) {
            Ok(out) => println!("cos n={n} s={s}: {}  est {:.1e}  ({:?})", out.value, out.error_estimate, t0.elapsed()),
            Err(e) => println!("cos n={n} s={s}: ERR {e}"),
        }
    }
}
