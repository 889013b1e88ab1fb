// Scratch validation driver; prints observables for comparison against
// independently computed reference values. Not part of the test suite.

use num_complex::Complex64;
use splashwave_core::analysis::{cusp, hardy, multiplier, strip};
use splashwave_core::solver::{
    self, flat_state, margins, newton_solve, rank_monitor, relaxed_root, ConstraintChart,
    NewtonOptions, PhysicalParams, RelaxedOptions, SolverContext,
};
use splashwave_core::{crapper, geometry, operators, spectral};
use splashwave_core::{Parity, PeriodicField, PeriodicGrid, WaveCurve};
use std::f64::consts::PI;
use std::time::Instant;

fn main() {
    let section = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    match section.as_str() {
        "spectral" => run_spectral(),
        "crapper" => run_crapper(),
        "geometry" => run_geometry(),
        "operators" => run_operators(),
        "analysis" => run_analysis(),
        "solver" => run_solver(),
        "newton" => run_newton(),
        "relaxed" => run_relaxed(),
        _ => {
            run_spectral();
            run_crapper();
            run_geometry();
            run_operators();
            run_analysis();
            run_solver();
        }
    }
}

fn run_spectral() {
    println!("== spectral ==");
    let grid = PeriodicGrid::new(64).unwrap();
    let f = PeriodicField::from_fn(grid, Parity::None, |a| (3.0 * a).cos() + 0.25 * a.sin()).unwrap();
    let hf = f.hilbert();
    let mut err = 0.0f64;
    for (j, &v) in hf.values().iter().enumerate() {
        let a = grid.node(j);
        err = err.max((v - (-(3.0 * a).sin() + 0.25 * a.cos())).abs());
    }
    println!("hilbert err          {err:.3e}");

    let g = PeriodicField::from_fn(grid, Parity::None, |a| (a.cos()).exp()).unwrap();
    let gp = g.derivative();
    let mut err = 0.0f64;
    for (j, &v) in gp.values().iter().enumerate() {
        let a = grid.node(j);
        err = err.max((v - (-(a.sin()) * (a.cos()).exp())).abs());
    }
    println!("derivative err       {err:.3e}");

    let anti = gp.antiderivative_from(g.values()[0] - g.mean());
    let mut err = 0.0f64;
    for (j, &v) in anti.iter().enumerate() {
        err = err.max((v + g.mean() - g.values()[j]).abs());
    }
    println!("antiderivative err   {err:.3e}");

    let series = spectral::TrigSeries::from_real_samples(g.values());
    let z = Complex64::new(0.37, 0.0);
    println!(
        "series eval err      {:.3e}",
        (series.eval_at(z).re - (0.37f64.cos()).exp()).abs()
    );

    let grid = PeriodicGrid::new(512).unwrap();
    for m in [3usize, 200, 255] {
        let f = PeriodicField::from_fn(grid, Parity::None, |a| (m as f64 * a).cos()).unwrap();
        let fp = f.derivative();
        let mut err = 0.0f64;
        for (j, &v) in fp.values().iter().enumerate() {
            let a = grid.node(j);
            err = err.max((v + m as f64 * (m as f64 * a).sin()).abs());
        }
        let hf = f.hilbert();
        let mut herr = 0.0f64;
        for (j, &v) in hf.values().iter().enumerate() {
            let a = grid.node(j);
            herr = herr.max((v + (m as f64 * a).sin()).abs());
        }
        println!("mode {m}: deriv err {err:.3e}  hilbert err {herr:.3e}");
    }
    for m in [3usize, 200] {
        let f = PeriodicField::from_fn(grid, Parity::Odd, |a| (m as f64 * a).sin()).unwrap();
        let fp = f.derivative();
        let mut err = 0.0f64;
        for (j, &v) in fp.values().iter().enumerate() {
            let a = grid.node(j);
            err = err.max((v - m as f64 * (m as f64 * a).cos()).abs());
        }
        println!("sin mode {m}: deriv err {err:.3e}");
    }
    let th = crapper::theta_field(crapper::SPLASH_AMPLITUDE, grid);
    let thp = th.derivative();
    let mut err = 0.0f64;
    for (j, &v) in thp.values().iter().enumerate() {
        let a = grid.node(j);
        err = err.max((v - crapper::theta_derivative(crapper::SPLASH_AMPLITUDE, a)).abs());
    }
    println!("critical theta' err (512) {err:.3e}");

    let grid = PeriodicGrid::new(1024).unwrap();
    let th = crapper::theta_field(crapper::SPLASH_AMPLITUDE, grid);
    println!("theta sup (1024) {:.6}", th.sup_norm());
    let thp = th.derivative();
    let mut err = 0.0f64;
    for (j, &v) in thp.values().iter().enumerate() {
        let a = grid.node(j);
        err = err.max((v - crapper::theta_derivative(crapper::SPLASH_AMPLITUDE, a)).abs());
    }
    println!("critical theta' err (1024) {err:.3e}");
    let curve = WaveCurve::from_family(crapper::SPLASH_AMPLITUDE, grid);
    let thp2 = curve.theta().derivative();
    let mut dev = 0.0f64;
    for (j, &v) in thp2.values().iter().enumerate() {
        dev = dev.max((v - thp.values()[j]).abs());
    }
    println!("curve theta' dev (1024) {dev:.3e}");
}

fn run_crapper() {
    println!("== crapper ==");
    let a0 = crapper::SPLASH_AMPLITUDE;
    let ast = crapper::CONTACT_ABSCISSA;
    println!("theta'(a*)     {:.16}", crapper::theta_derivative(a0, ast));
    println!("tau*           {:.20}", crapper::tau(a0, ast));
    println!("q(A0)          {:.20}", crapper::speed_factor(a0));
    println!("signed_gap(.40) {:.9}", crapper::signed_gap(0.40));
    println!("threshold      {:.20}", crapper::find_splash_threshold());
    println!("abscissa(A0)   {:.20}", crapper::contact_abscissa(a0).unwrap());
    println!("stationarity(0.2, 512) {:.3e}", crapper::stationarity_residual(0.2, 512));
    let z0 = crapper::curve_point(a0, 0.0);
    println!("z(0)           {:.6} {:.16}", z0.re, z0.im);
    println!("z(0) ref       {:.16}", -4.0 * a0 / (1.0 + a0));
    println!("A_c            {:.16}", crapper::vertical_tangent_amplitude());
    println!("max_incl(A0)   {:.9}", crapper::max_inclination(a0));
    println!("max_incl(0.40) {:.9}", crapper::max_inclination(0.40));
    let grid = PeriodicGrid::new(2048).unwrap();
    let curve = WaveCurve::from_family(a0, grid).with_contact(ast);
    println!("splash_gap(A0, 2048) {:.3e}", curve.splash_gap());
}

fn run_geometry() {
    println!("== geometry ==");
    let grid = PeriodicGrid::new(512).unwrap();
    let curve = WaveCurve::from_family(0.2, grid);
    println!("arc_chord sup(0.2)  {:.9}", curve.arc_chord_sup(0.0));
    let kap = curve.curvature();
    let kmin = kap.iter().cloned().fold(f64::INFINITY, f64::min);
    let kmax = kap.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("K range(0.2)   [{:.9}, {:.9}]  ref [{:.9}, {:.9}]", kmin, kmax, -10.0 / 27.0, 15.0 / 8.0);
    let mut kerr = 0.0f64;
    for (j, &k) in kap.iter().enumerate() {
        let a = grid.node(j);
        kerr = kerr.max((k - crapper::theta_derivative(0.2, a) * crapper::tau(0.2, a).exp()).abs());
    }
    println!("K identity err {:.3e}", kerr);

    let a0 = crapper::SPLASH_AMPLITUDE;
    let ast = crapper::CONTACT_ABSCISSA;
    let g2048 = PeriodicGrid::new(2048).unwrap();
    let curve0 = WaveCurve::from_family(a0, g2048).with_contact(ast);
    let prof = curve0.graph_profile(0.2, 64).unwrap();
    let st = prof.strength().unwrap();
    println!("strength mu    {:.12}", st.mu);
    println!("strength k     {:.12}", st.k);
    println!("strength resid {:.3e}", st.fit_residual);
    let g1024 = PeriodicGrid::new(1024).unwrap();
    let curve1 = WaveCurve::from_family(a0, g1024).with_contact(ast);
    println!("contact_gauge  {:.12}", curve1.contact_gauge(0.3).unwrap());
    let thp = curve1.theta().derivative();
    let thpp = thp.derivative();
    let t1 = thp
        .values()
        .iter()
        .zip(thpp.values())
        .map(|(&x, &y)| x * x + y * y)
        .sum::<f64>()
        * g1024.spacing();
    println!("  t1 {:.12}", t1.sqrt());
    let sp = thp.values().iter().map(|&x| x * x).sum::<f64>() * g1024.spacing();
    let spp = thpp.values().iter().map(|&x| x * x).sum::<f64>() * g1024.spacing();
    let mp = thp.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mpp = thpp.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    println!("  sum_thp2 {sp:.6} sum_thpp2 {spp:.6} max_thp {mp:.6} max_thpp {mpp:.6}");
    let mut dev_an = 0.0f64;
    let mut dth_lo = f64::INFINITY;
    let mut dth_hi = f64::NEG_INFINITY;
    for (j, &v) in thp.values().iter().enumerate() {
        let al = g1024.node(j);
        dev_an = dev_an.max((v - crapper::theta_derivative(a0, al)).abs());
        let d = v - curve1.theta().values()[j];
        dth_lo = dth_lo.min(d);
        dth_hi = dth_hi.max(d);
    }
    println!("  thp vs analytic {dev_an:.3e}  thp-theta range [{dth_lo:.6}, {dth_hi:.6}]  parity {:?}", thp.parity());
    let series = spectral::TrigSeries::from_real_samples(curve1.theta().values());
    let mut smin = f64::INFINITY;
    for j in 0..20001 {
        let al = ast - 0.3 + 0.6 * j as f64 / 20000.0;
        smin = smin.min(series.eval_derivative(al).re.abs());
    }
    println!("  t2 {:.12}", 1.0 / smin);
    println!("  t3 {:.12}", curve1.arc_chord_sup(0.15));
    for e in [0.5, 0.3, 0.1] {
        println!("  arc_chord(A0,1024,{e}) {:.7}", curve1.arc_chord_sup(e));
    }

    let mesh = geometry::NormMesh {
        lo: 0.0,
        hi: 1.0,
        ..geometry::NormMesh::default()
    };
    let nrm = geometry::weighted_norm(|_| 1.0, 0.0, 2.0, 0.2, &mesh).unwrap();
    println!("weighted model {:.12}  exact {:.12}", nrm, 1.4f64.powf(-0.5));
    let sol = operators::solve_vorticity(&WaveCurve::from_family(0.2, grid), operators::VorticityForm::CosTheta).unwrap();
    let series = spectral::TrigSeries::from_real_samples(sol.omega.values());
    let mesh = geometry::NormMesh::default();
    let wom = geometry::weighted_norm(|s| series.eval(s).re, ast, 2.0, 0.2, &mesh).unwrap();
    println!("weighted omega {:.12}", wom);
}

fn run_operators() {
    println!("== operators ==");
    let grid = PeriodicGrid::new(512).unwrap();

    let flat = WaveCurve::from_family(0.0, grid);
    let s = operators::assemble_s(&flat);
    let t = operators::assemble_t(&flat);
    println!("flat |S|       {:.3e}", s.amax());
    println!("flat |T|       {:.3e}", t.amax());

    let circle = WaveCurve::circle(grid);
    let tc = operators::assemble_t(&circle);
    let mut e0 = 0.0f64;
    for i in 0..grid.len() {
        let row: f64 = (0..grid.len()).map(|j| tc[(i, j)]).sum();
        e0 = e0.max((row - PI).abs());
    }
    println!("circle T1=pi   {:.3e}", e0);

    let curve = WaveCurve::from_family(0.2, grid);
    let s = operators::assemble_s(&curve);
    let t = operators::assemble_t(&curve);
    let ones = vec![1.0; grid.len()];
    let t1: Vec<f64> = (0..grid.len())
        .map(|i| (0..grid.len()).map(|j| t[(i, j)] * ones[j]).sum())
        .collect();
    let s1: Vec<f64> = (0..grid.len())
        .map(|i| (0..grid.len()).map(|j| s[(i, j)] * ones[j]).sum())
        .collect();
    let mut e1 = 0.0f64;
    let mut e2 = 0.0f64;
    for i in 0..grid.len() {
        e1 = e1.max(t1[i].abs());
        e2 = e2.max((s1[i] - PI * (1.0 - curve.zp()[i].re)).abs());
    }
    println!("wave T1        {:.3e}", e1);
    println!("S1 err         {:.3e}", e2);

    let omega = PeriodicField::from_fn(grid, Parity::None, |a| 1.0 + 0.3 * a.cos() + 0.1 * (2.0 * a).sin()).unwrap();
    let _br = operators::birkhoff_rott(&curve, &omega);
    let mut e3 = 0.0f64;
    let one = PeriodicField::from_fn(grid, Parity::Even, |_| 1.0).unwrap();
    let br1 = operators::birkhoff_rott(&curve, &one);
    for (i, &w) in br1.iter().enumerate() {
        let zp = curve.zp()[i];
        e3 = e3.max((w - (1.0 - zp) / (2.0 * zp)).norm());
    }
    println!("BR(1) err      {:.3e}", e3);

    // (T omega)' = -S omega'
    let tom: Vec<f64> = (0..grid.len())
        .map(|i| (0..grid.len()).map(|j| t[(i, j)] * omega.values()[j]).sum())
        .collect();
    let tom = PeriodicField::new(grid, tom, Parity::None).unwrap();
    let tomp = tom.derivative();
    let omp = omega.derivative();
    let somp: Vec<f64> = (0..grid.len())
        .map(|i| (0..grid.len()).map(|j| s[(i, j)] * omp.values()[j]).sum())
        .collect();
    let mut e4 = 0.0f64;
    for i in 0..grid.len() {
        e4 = e4.max((tomp.values()[i] + somp[i]).abs());
    }
    println!("(T w)'+S w'    {:.3e}", e4);

    // far field below the sheet
    let p = Complex64::new(0.7, -40.0);
    let v = operators::velocity_at(&curve, &ones, p);
    println!("far W-1/2      {:.3e} {:.3e}", (v.re - 0.5).abs(), v.im.abs());
    let pot = operators::potential_at(&curve, &ones, p);
    println!("far V-y-2ln2   {:.3e}", pot - p.im - 2.0 * (2.0f64).ln());

    let sol = operators::solve_vorticity(&curve, operators::VorticityForm::CosTheta).unwrap();
    println!("vort resid     {:.3e}", sol.residual_sup);
    println!("int w - 2pi    {:.16}", sol.integral - 2.0 * PI);
    let mut dev = 0.0f64;
    for &w in sol.omega.values() {
        dev = dev.max((w - 1.0).abs());
    }
    println!("|w-1|inf       {:.15}", dev);
    println!("w(0-node)      {:.17}", sol.omega.values()[grid.center()]);
    println!("cond           {:.6}", sol.cond);

    let st = &s - &t;
    let sv = operators::even_singular_values(&st);
    println!("even sigma1    {:.6}", sv[0]);
    for j in [1usize, 2, 3, 19] {
        println!("even sv[{:2}]/sv[0]  {:.3e}", j, sv[j] / sv[0]);
    }
    let full = st.clone().svd(false, false).singular_values;
    let mut fsv: Vec<f64> = full.iter().copied().collect();
    fsv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    println!("full sigma1    {:.6}", fsv[0]);
    for j in [2usize, 4, 6, 19] {
        println!("full sv[{:2}]/sv[0]  {:.3e}", j, fsv[j] / fsv[0]);
    }

    // critical curve vorticity at several n
    for n in [256usize, 512] {
        let g = PeriodicGrid::new(n).unwrap();
        let c = WaveCurve::from_family(crapper::SPLASH_AMPLITUDE, g)
            .with_contact(crapper::CONTACT_ABSCISSA);
        let sol = operators::solve_vorticity(&c, operators::VorticityForm::CosTheta).unwrap();
        let winf = sol.omega.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        println!(
            "critical n={n}: int-2pi {:.10}  |w| {:.10}  resid {:.3e}  cond {:.3}",
            sol.integral - 2.0 * PI,
            winf,
            sol.residual_sup,
            sol.cond
        );
    }

    let g = PeriodicGrid::new(256).unwrap();
    let c = WaveCurve::from_family(crapper::SPLASH_AMPLITUDE, g).with_contact(crapper::CONTACT_ABSCISSA);
    let half = operators::HalfOperator::new(&c, None);
    println!("poles          {}", half.poles().len());
    for &(i, p) in half.poles().iter().take(3) {
        println!("  node {i}: {:.6} {:.6e}", p.re, p.im);
    }
    let t0 = Instant::now();
    let hm = half.half_matrix();
    println!("half assemble  {:.1} ms  digest {}", t0.elapsed().as_secs_f64() * 1e3, operators::matrix_digest(&hm));
}

fn run_analysis() {
    println!("== analysis ==");
    use multiplier::{Symbol, Weight};
    for (n, w) in [(1usize, Weight::Bracket), (2, Weight::Bracket), (4, Weight::Bracket), (1, Weight::Plain)] {
        let r = multiplier::sup_weighted(Symbol::Tanh, n, w, 10_000).unwrap();
        println!("tanh n={} {:?}: sup {:.16} at {:.4}", n, w, r.sup, r.argmax);
    }
    let r = multiplier::sup_weighted(Symbol::RegularizedCoth, 1, Weight::Bracket, 10_000).unwrap();
    println!("coth n=1 Bracket: sup {:.16} at {:.4}", r.sup, r.argmax);

    let sg = strip::StripGrid::standard();
    let win = sg.taper();
    let reg: Vec<usize> = (0..sg.len()).filter(|&i| sg.tau()[i].abs() <= 10.0).collect();

    // symmetric cos data against the closed-form extension
    let xi0 = 1.0f64;
    let data: Vec<f64> = sg
        .tau()
        .iter()
        .zip(&win)
        .map(|(&t, &w)| w * (xi0 * t).cos())
        .collect();
    let mut worst = 0.0f64;
    for nu in [0.0, 0.3 * PI, -0.45 * PI, PI / 2.0 - 1e-3] {
        let got = sg.extend(&data, &data, nu);
        let mut amp = 0.0f64;
        let mut err = 0.0f64;
        for &i in &reg {
            let exact = (xi0 * sg.tau()[i]).cos() * (xi0 * nu).cosh() / (PI * xi0 / 2.0).cosh();
            amp = amp.max(exact.abs());
            err = err.max((got[i] - exact).abs());
        }
        worst = worst.max(err / amp);
    }
    println!("cos extend     {:.3e}", worst);
    let (dn_top, _) = sg.neumann(&data, &data);
    let mut en = 0.0f64;
    let mut amp = 0.0f64;
    for &i in &reg {
        let exact = xi0 * (PI * xi0 / 2.0).tanh() * (xi0 * sg.tau()[i]).cos();
        amp = amp.max(exact.abs());
        en = en.max((dn_top[i] - exact).abs());
    }
    println!("cos neumann    {:.3e}", en / amp);

    // decaying asymmetric data: three-term identity, FD consistency, boundary recovery
    let top: Vec<f64> = sg
        .tau()
        .iter()
        .zip(&win)
        .map(|(&t, &w)| w * (-(t * t) / 8.0).exp())
        .collect();
    let bottom: Vec<f64> = sg
        .tau()
        .iter()
        .zip(&win)
        .map(|(&t, &w)| w * 0.5 * (-(t - 1.0) * (t - 1.0) / 6.0).exp())
        .collect();
    let (dn_top, dn_bot) = sg.neumann(&top, &bottom);
    let three = sg.neumann_three_term(&top, &bottom);
    let mut err = 0.0f64;
    for &i in &reg {
        err = err.max((dn_top[i] - three[i]).abs());
    }
    println!("three-term     {:.3e}", err);
    let _ = dn_bot;

    let h = 1e-3;
    let nu0 = PI / 2.0 - h;
    let ep = sg.extend(&top, &bottom, nu0 + h);
    let em = sg.extend(&top, &bottom, nu0 - h);
    let an = sg.normal_derivative(&top, &bottom, nu0);
    let mut fd_err = 0.0f64;
    let mut an_amp = 0.0f64;
    for &i in &reg {
        let fd = (ep[i] - em[i]) / (2.0 * h);
        fd_err = fd_err.max((fd - an[i]).abs());
        an_amp = an_amp.max(an[i].abs());
    }
    println!("FD vs dnu      {:.3e}", fd_err / an_amp);

    let got = sg.extend(&top, &bottom, PI / 2.0);
    let mut brec = 0.0f64;
    for i in 0..sg.len() {
        brec = brec.max((got[i] - top[i]).abs());
    }
    let got = sg.extend(&top, &bottom, -PI / 2.0);
    for i in 0..sg.len() {
        brec = brec.max((got[i] - bottom[i]).abs());
    }
    println!("boundary rec   {:.3e}", brec);

    for (gamma, tag) in [(-0.2, "int"), (-0.7, "end")] {
        for size in [400usize, 800] {
            let cfg = hardy::ProbeConfig {
                beta: 0.3,
                gamma,
                size,
                side: hardy::Side::Left,
                weighted: true,
                graded: true,
            };
            let sv = hardy::compactness_probe(&cfg);
            println!(
                "hardy {tag}/M{size}  s1 {:.6}  s20/s1 {:.6e}",
                sv[0],
                sv[19] / sv[0]
            );
        }
    }
    let e400 = hardy::empirical_constant(400, 0.3, 100, 7);
    let e800 = hardy::empirical_constant(800, 0.3, 100, 7);
    println!("hardy emp      M400 {:.12}  M800 {:.12}  ratio {:.6}", e400, e800, e800 / e400);

    let p = cusp::CuspParams::new(0.5, 1.0, 0.2).unwrap();
    let (s1, s2) = cusp::decay_slopes(&p).unwrap();
    println!("cusp mu=.5     {:.6} {:.6}", s1, s2);
    let p = cusp::CuspParams::new(1.0, 1.0, 0.2).unwrap();
    let (s1, s2) = cusp::decay_slopes(&p).unwrap();
    println!("cusp mu=1      {:.6} {:.6}", s1, s2);
    let p = cusp::CuspParams::new(0.5, 0.7, 0.3).unwrap();
    let ts: Vec<f64> = (0..25)
        .map(|i| (1e2f64.ln() + (1e4f64.ln() - 1e2f64.ln()) * i as f64 / 24.0).exp())
        .collect();
    let hs = cusp::height_ode(&p, &ts).unwrap();
    let mut err = 0.0f64;
    for (i, &t) in ts.iter().enumerate() {
        let model = cusp::height_model(&p, t);
        err = err.max((hs[i] - model).abs() / model);
    }
    println!("ode vs closed  {:.3e}", err);
}

fn run_solver() {
    println!("== solver ==");
    let grid = PeriodicGrid::new(256).unwrap();
    let chart = ConstraintChart::critical(grid);
    println!("chart dim      {} (expect {})", chart.dim(), grid.len() / 2 - 2);

    // chart round trip at y = 0
    let y = nalgebra::DVector::<f64>::zeros(chart.dim());
    let (theta, tau) = chart.theta_tau(&y).unwrap();
    let theta_a = crapper::theta_field(crapper::SPLASH_AMPLITUDE, grid);
    let tau_a = crapper::tau_field(crapper::SPLASH_AMPLITUDE, grid);
    let mut e1 = 0.0f64;
    let mut e2 = 0.0f64;
    for j in 0..grid.len() {
        e1 = e1.max((theta.values()[j] - theta_a.values()[j]).abs());
        e2 = e2.max((tau.values()[j] - tau_a.values()[j]).abs());
    }
    println!("chart theta err {:.3e}  tau err {:.3e}", e1, e2);
    let base = PeriodicField::new(grid, chart.base().to_vec(), Parity::Even).unwrap();
    let res = chart.constraint_residuals(&base);
    println!("base constraints {:.3e} {:.3e} {:.3e}", res[0], res[1], res[2]);

    let ctx = SolverContext::new(chart, operators::VorticityForm::CosTheta);
    let q = crapper::speed_factor(crapper::SPLASH_AMPLITUDE);
    let t0 = Instant::now();
    let state = ctx.critical_state(q).unwrap();
    println!("critical_state {:.1} ms", t0.elapsed().as_secs_f64() * 1e3);
    println!("critical resid {:.3e}", ctx.residual_sup(&state).unwrap());
    println!("residual_norms {:?}", state.residual_norms);
    let curve = state.curve().unwrap();
    let m = margins(&curve).unwrap();
    println!(
        "margins: chord {:.4} slope {:.4e} lift {:.4e} adm {}",
        m.chord_arc_sup, m.slope_max, m.lift_min, m.admissible()
    );

    let t0 = Instant::now();
    let rm = rank_monitor(&ctx, &state).unwrap();
    println!("rank_monitor   {:.2} s", t0.elapsed().as_secs_f64());
    println!(
        "  smin {:.6e} bordered {:.6e} jump {:.4} pairing {:.4}",
        rm.unbordered_min, rm.bordered_min, rm.jump, rm.pairing
    );

    // flat root
    let flat = flat_state(grid, 0.1, 0.05, 1.2).unwrap();
    let fctx = SolverContext::new(
        ConstraintChart::new(grid, crapper::CONTACT_ABSCISSA, vec![1.0; grid.len()]),
        operators::VorticityForm::CosTheta,
    );
    println!("flat resid     {:.3e}", fctx.residual_sup(&flat).unwrap());
}

fn run_newton() {
    println!("== newton ==");
    let grid = PeriodicGrid::new(256).unwrap();
    let chart = ConstraintChart::critical(grid);
    let ctx = SolverContext::new(chart, operators::VorticityForm::CosTheta);
    let q = crapper::speed_factor(crapper::SPLASH_AMPLITUDE);
    let state = ctx.critical_state(q).unwrap();

    let t0 = Instant::now();
    let fd = solver::jacobian_fd_check(&ctx, &state, 3, 1e-5, 11).unwrap();
    println!("fd check       {:.3e}  ({:.1} s)", fd, t0.elapsed().as_secs_f64());

    let params = PhysicalParams::critical().with_target(0.005, 0.0);
    let opts = NewtonOptions::default();
    let t0 = Instant::now();
    match newton_solve(&ctx, &state, params, &opts) {
        Ok(s) => println!("newton(.005,0) CONVERGED iters {} resid {:?}", s.newton_iters, s.residual_norms),
        Err(solver::SolverError::NoConvergence {
            best,
            iters,
            residual_sup,
            gradient_ratio,
            stalled,
        }) => {
            println!(
                "newton(.005,0) no-conv: iters {iters} resid {residual_sup:.6e} grad {gradient_ratio:.3e} stalled {stalled}"
            );
            println!("  best kappa {:.8}", best.params.kappa_b);
        }
        Err(e) => println!("newton error: {e}"),
    }
    println!("newton took    {:.1} s", t0.elapsed().as_secs_f64());
}

fn run_relaxed() {
    println!("== relaxed ==");
    let grid = PeriodicGrid::new(256).unwrap();
    let chart = ConstraintChart::critical(grid);
    let ctx = SolverContext::new(chart, operators::VorticityForm::Tangent);
    let q = crapper::speed_factor(crapper::SPLASH_AMPLITUDE);
    let state = ctx.critical_state(q).unwrap();
    println!("critical resid (tangent) {:.3e}", ctx.residual_sup(&state).unwrap());

    for (eps, pin) in [(0.0025f64, true), (0.0025, false)] {
        let params = PhysicalParams::critical().with_target(eps, 0.0);
        let opts = RelaxedOptions {
            pin_contact_angle: pin,
            ..RelaxedOptions::default()
        };
        let t0 = Instant::now();
        match relaxed_root(&ctx, &state, params, &opts) {
            Ok(r) => {
                let gap = r.state.curve().unwrap().splash_gap();
                println!(
                    "relaxed eps={eps} pin={pin}: resid {:.3e} iters {} kappa {:.8} gap {:.6} shift {:.4e} constraints {:.2e} {:.2e} {:.2e}  ({:.1} s)",
                    r.residual_sup,
                    r.iters,
                    r.state.params.kappa_b,
                    gap,
                    r.tau_shift,
                    r.constraint_residuals[0],
                    r.constraint_residuals[1],
                    r.constraint_residuals[2],
                    t0.elapsed().as_secs_f64()
                );
            }
            Err(e) => println!("relaxed eps={eps} pin={pin}: error {e}"),
        }
    }
}
