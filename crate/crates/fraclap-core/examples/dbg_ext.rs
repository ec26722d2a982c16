fn main() {
    use fraclap_core::*;
    use fraclap_core::potentials::poisson_extend;
    let params = FracParams::new(2, 0.25, None, None).unwrap();
    let quad = QuadSpec::default_for_spacing(0.02).with_tol(1e-4);
    for xp in [[0.0,0.0],[0.5,0.3],[-0.8,0.1]] {
        let x = Point::d2(xp[0], xp[1]);
        match poisson_extend(&Exterior::Constant(1.0), x, &params, &quad) {
            Ok(v) => println!("x={xp:?}: {v}  (err {})", (v-1.0).abs()),
            Err(e) => println!("x={xp:?}: ERR {e}"),
        }
    }
    let params = FracParams::new(2, 0.75, None, None).unwrap();
    let g = Exterior::shell_table(vec![1.5, 2.0, 3.0], vec![0.7, 0.1, 0.4]).unwrap();
    for xp in [[0.0,0.0],[0.6,0.3],[-0.85,0.1]] {
        let x = Point::d2(xp[0], xp[1]);
        match poisson_extend(&g, x, &params, &quad) {
            Ok(v) => println!("shell x={xp:?}: {v}"),
            Err(e) => println!("shell x={xp:?}: ERR {e}"),
        }
    }
}
