use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use regeval::metrics::{hd95_labels, lncc, ndv};
use regeval::synth::{make_phantom, random_velocity, PhantomSpec};
use regeval::warp::{compose, exp_svf, warp_image, DEFAULT_SQUARINGS};
use regeval::Dims;

/// Runs `f` inside a pool of `threads` workers; without the `parallel`
/// feature every kernel is sequential and the pool size is ignored.
#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R: Send>(_threads: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

fn configurations() -> Vec<(&'static str, usize)> {
    let all = std::thread::available_parallelism().map_or(1, |n| n.get());
    if cfg!(feature = "parallel") && all > 1 {
        vec![("sequential", 1), ("parallel", all)]
    } else {
        vec![("sequential", 1)]
    }
}

fn kernels(c: &mut Criterion) {
    let dims = Dims::cube(64);
    let ph = make_phantom(&PhantomSpec::nested(dims, 8, 1, 0.02)).unwrap();
    let v = random_velocity(&ph.image.header, 2, 3.0, 6.0).unwrap();
    let phi = exp_svf(&v, DEFAULT_SQUARINGS).unwrap();
    let warped = warp_image(&ph.image, &phi);
    let warped_labels = regeval::warp::warp_labels(&ph.labels, &phi);
    let labels: Vec<u32> = (1..=8).collect();
    let mask = ph.labels.foreground();
    let spacing = ph.labels.header.spacing;

    let mut g = c.benchmark_group("kernels_64");
    g.sample_size(10);
    for (name, threads) in configurations() {
        g.bench_function(BenchmarkId::new("warp_image", name), |b| {
            b.iter(|| with_threads(threads, || warp_image(&ph.image, &phi)))
        });
        g.bench_function(BenchmarkId::new("compose", name), |b| {
            b.iter(|| with_threads(threads, || compose(&phi, &phi).unwrap()))
        });
        g.bench_function(BenchmarkId::new("hd95", name), |b| {
            b.iter(|| with_threads(threads, || hd95_labels(&ph.labels, &warped_labels, &labels, spacing).unwrap()))
        });
        g.bench_function(BenchmarkId::new("ndv", name), |b| {
            b.iter(|| with_threads(threads, || ndv(&phi, &mask).unwrap()))
        });
        g.bench_function(BenchmarkId::new("lncc", name), |b| {
            b.iter(|| with_threads(threads, || lncc(&ph.image, &warped, 9).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
