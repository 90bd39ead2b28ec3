//! Calibration sweep: how far the desk-scale empirical moments sit from
//! their N -> infinity limits. Informs the sample counts used by the
//! acceptance suite. Run with
//! `cargo run -p mesowig --example calibrate --release`.

use mesowig::ensemble::EnsembleSpec;
use mesowig::stats;
use mesowig::theory::MesoscopicScale;
use num_complex::Complex64;

fn main() {
    let scale = MesoscopicScale::new(0.5, 0.0).unwrap();
    let i = Complex64::new(0.0, 1.0);

    for (n, samples) in [(256usize, 8000usize), (512, 4000), (1024, 1500)] {
        let spec = EnsembleSpec::goe(n, 4242);
        let r = stats::run_resolvent_experiment(&spec, &scale, &[i], samples).unwrap();
        let var = r.cov_empirical[0][0];
        let mean = r.means[0];
        let pseudo = r.pseudo_cov_empirical[0][0];
        println!(
            "GOE N={n} S={samples}: E|Y|^2 = {:.4} +- {:.4} (offset {:+.4}), \
             EY = {:.5}{:+.5}i +- {:.5}, EY^2 = {:.4}{:+.4}i",
            var.re,
            var.se_re,
            var.re - 0.5,
            mean.re,
            mean.im,
            mean.se_re.hypot(mean.se_im),
            pseudo.re,
            pseudo.im,
        );
        // Bias of E Gbar - m: mean(Y)/(N eta).
        let n_eta = n as f64 * scale.eta(n);
        println!(
            "     bias |E Gbar - m| = {:.2e} (se {:.2e}); 1/(4N) = {:.2e}",
            mean.value().norm() / n_eta,
            mean.se_re.hypot(mean.se_im) / n_eta,
            1.0 / (4.0 * n as f64),
        );
    }

    for (n, samples) in [(512usize, 2000usize), (1024, 800)] {
        let spec = EnsembleSpec::gue(n, 777);
        let r = stats::run_resolvent_experiment(&spec, &scale, &[i], samples).unwrap();
        let var = r.cov_empirical[0][0];
        println!(
            "GUE N={n} S={samples}: E|Y|^2 = {:.4} +- {:.4} (target 0.25, offset {:+.4})",
            var.re,
            var.se_re,
            var.re - 0.25
        );
    }
}
