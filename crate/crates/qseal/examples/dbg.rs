use qseal::*;
fn main() {
    for t in [0.1, 0.35, 0.6, 0.9, 1.0] {
        let a = analyze_scheme(&make_stringent_scheme(t).unwrap()).unwrap();
        let b = analyze_scheme(&make_product_scheme(t).unwrap()).unwrap();
        println!("t={t}: rho0 diff {:.3e}  rho1 diff {:.3e}  qa={:.17} qb={:.17}",
            a.rho0.max_diff(&b.rho0), a.rho1.max_diff(&b.rho1), a.q_max, b.q_max);
        println!("   stringent rho0 = {:?} {:?}", a.rho0.get(0,0).re, a.rho0.get(1,1).re);
        println!("   product   rho0 = {:?} {:?}", b.rho0.get(0,0).re, b.rho0.get(1,1).re);
    }
}
