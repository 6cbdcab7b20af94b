// scratch: isolate multiplication-operator error source
use wigner_mrsolve::wavelet::*;
use wigner_mrsolve::moyal::Banded1D;
use ndarray::Array2;

fn main() {
    let f = daubechies_filter(6).unwrap();
    let basis = ScalingBasis::new(&f).unwrap();
    let moments = moment_table(&f);
    for n in [64usize, 128, 256] {
        let x_min = -6.0;
        let h = 12.0 / n as f64;
        let field = Array2::from_shape_fn((n, 4), |(i, _)| {
            let x = x_min + i as f64 * h;
            (-x * x).exp()
        });
        let poly = [1.0, 2.0, 0.5];
        let pf = Array2::from_shape_fn((n, 4), |(i, _)| {
            let x = x_min + i as f64 * h;
            (1.0 + 2.0*x + 0.5*x*x) * (-x * x).exp()
        });
        let c = basis.to_coefficients(&field);
        let m = Banded1D::multiplication(n, &poly, x_min, h, &moments);
        let mut mc = Array2::zeros((n, 4));
        m.apply_rows(&c, &mut mc);
        let back = basis.to_samples(&mc);
        // route B: pointwise product through the same sandwich
        let c2 = basis.to_coefficients(&pf);
        let back2 = basis.to_samples(&c2);
        let mut err_m = 0.0f64;
        let mut err_rt = 0.0f64;
        let mut err_mc = 0.0f64;
        for i in 0..n {
            err_m = err_m.max((back[(i,0)] - pf[(i,0)]).abs());
            err_rt = err_rt.max((back2[(i,0)] - pf[(i,0)]).abs());
            err_mc = err_mc.max((mc[(i,0)] - c2[(i,0)]).abs());
        }
        println!("n {n}: sandwich-with-M {err_m:.3e}  plain-roundtrip {err_rt:.3e}  coeff-vs-coeff {err_mc:.3e}");
    }
}
