use renyiqkd::ipm::{solve_with_log, ProgramBuilder, SolveOptions};
use renyiqkd::stdcones::StandardCone;

fn main() {
    let d = 4;
    let mut b = ProgramBuilder::<f64>::new();
    let kl = b.add_standard_cone(StandardCone::Kl { dim: d });
    for i in 0..d {
        b.add_row(vec![(kl.index(1 + d + i), 1.0)], 1.0 / d as f64);
    }
    b.add_row((0..d).map(|i| (kl.index(1 + i), 1.0)).collect(), 1.0);
    b.objective_term(kl.index(0), 1.0);
    let prog = b.finish();
    let mut cb = |info: &renyiqkd::ipm::IterInfo| {
        println!("{info}");
    };
    let r = solve_with_log(&prog, &SolveOptions::default(), Some(&mut cb));
    println!("status {:?} obj {} iters {}", r.status, r.objective, r.iterations);
    println!("x = {:?}", r.x);
}
