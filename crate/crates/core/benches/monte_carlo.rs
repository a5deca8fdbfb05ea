use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use aoa_jam::array::{steering_vector, ArrayGeometry};
use aoa_jam::estimation::{ml_spectrum_with, rz_noise_only, AngleGrid, TrainingSequence};
use aoa_jam::par::Execution;
use aoa_jam::seed::{complex_normal_vector, Seed};
use aoa_jam::sim::{run_scenario_with, JammerMode, ReceiverKnowledge, Scenario};

#[cfg_attr(not(feature = "parallel"), allow(unused_mut))]
fn modes() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    #[cfg(feature = "parallel")]
    v.push(("parallel", Execution::Parallel));
    v
}

fn scenario(n_r: usize, trials: usize) -> Scenario {
    Scenario {
        rx: ArrayGeometry::half_wavelength(n_r).unwrap(),
        jammer: ArrayGeometry::half_wavelength(4).unwrap(),
        theta_t: 23f64.to_radians(),
        theta_j: 40f64.to_radians(),
        phi_j: 0.0,
        k_t: 10.0,
        k_j: 10.0,
        training_len: 64,
        snr_db: 15.0,
        power_ratio: 4.0,
        jammer_mode: JammerMode::Aware,
        receiver_knowledge: ReceiverKnowledge::Statistical,
        trials,
        seed: Seed(7),
        block_fading: true,
        grid: AngleGrid::degrees(-90.0, 90.0, 1.0).unwrap(),
        refine: false,
    }
}

fn bench_scenario(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_scenario");
    group.sample_size(10);
    for n_r in [4, 16] {
        let s = scenario(n_r, 200);
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, n_r), &s, |b, s| {
                b.iter(|| run_scenario_with(exec, s).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("ml_spectrum");
    let grid = AngleGrid::default();
    for n_r in [8, 32] {
        let geom = ArrayGeometry::half_wavelength(n_r).unwrap();
        let a = steering_vector(&geom, 0.3).unwrap().into_entries();
        let x = TrainingSequence::gaussian(64, Seed(1)).unwrap();
        let mut rng = Seed(2).rng();
        let y: Vec<_> = x
            .symbols()
            .iter()
            .map(|&s| a.map(|z| z * s) + complex_normal_vector(&mut rng, n_r).scale(0.1))
            .collect();
        let rz = rz_noise_only(n_r, 0.01).unwrap();
        for (name, exec) in modes() {
            group.bench_function(BenchmarkId::new(name, n_r), |b| {
                b.iter(|| ml_spectrum_with(exec, &y, &x, &rz, &geom, &grid).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_scenario, bench_spectrum);
criterion_main!(benches);
