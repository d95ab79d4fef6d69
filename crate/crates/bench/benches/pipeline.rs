//! Benchmarks for the pipeline's hot paths: convolution forward/backward,
//! a full U-Net training step, delay-and-sum beamforming, and SSIM.

use criterion::{criterion_group, criterion_main, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use n2n_core::metrics::{ssim, SsimParams};
use n2n_core::nn::conv::{conv2d_backward, conv2d_forward, ConvGrads, ConvLayer, ConvScratch};
use n2n_core::nn::ops::mse_loss;
use n2n_core::nn::tensor::Tensor4;
use n2n_core::nn::unet::{ModelGrads, ModelParams, UNetConfig};
use n2n_core::rf_sim::beamform::das_beamform;
use n2n_core::rf_sim::frame::BeamformGrid;
use n2n_core::rf_sim::probe::{AttenuationModel, ProbeConfig};
use n2n_core::rf_sim::scatterers::{generate_scatterers, Extent};
use n2n_core::rf_sim::simulate::simulate_channel_data;

fn random_tensor(n: usize, c: usize, h: usize, w: usize, seed: u64) -> Tensor4<f32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Tensor4::from_vec(
        (0..n * c * h * w).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        n,
        c,
        h,
        w,
    )
}

fn bench_conv(c: &mut Criterion) {
    let input = random_tensor(1, 32, 48, 48, 1);
    let mut layer = ConvLayer::<f32>::zeros(32, 32, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    layer.weights.iter_mut().for_each(|w| *w = rng.gen_range(-0.1..0.1));
    let mut scratch = ConvScratch::new();
    c.bench_function("conv2d_forward 32x32ch 48x48", |b| {
        b.iter(|| conv2d_forward(black_box(&input), &layer, &mut scratch).unwrap())
    });
    let out = conv2d_forward(&input, &layer, &mut scratch).unwrap();
    c.bench_function("conv2d_backward 32x32ch 48x48", |b| {
        b.iter(|| {
            let mut grads = ConvGrads::zeros_like(&layer);
            conv2d_backward(&input, &layer, black_box(&out), &mut grads, &mut scratch).unwrap()
        })
    });
}

fn bench_unet_step(c: &mut Criterion) {
    let model = ModelParams::<f32>::init(UNetConfig::default(), 0).unwrap();
    let input = random_tensor(1, 1, 96, 96, 3);
    let target = random_tensor(1, 1, 96, 96, 4);
    c.bench_function("unet forward 96x96", |b| {
        b.iter(|| model.forward(black_box(&input)).unwrap())
    });
    c.bench_function("unet train step 96x96", |b| {
        b.iter(|| {
            let (pred, cache) = model.forward_cached(black_box(&input)).unwrap();
            let (_, grad) = mse_loss(&pred, &target).unwrap();
            let mut grads = ModelGrads::zeros_like(&model);
            model.backward(&cache, &grad, &mut grads).unwrap();
            grads
        })
    });
}

fn bench_simulation(c: &mut Criterion) {
    let probe = ProbeConfig::default();
    let extent = Extent {
        z_max: probe.max_depth(),
        x_min: -probe.half_aperture(),
        x_max: probe.half_aperture(),
    };
    let field = generate_scatterers(extent, 2e6, &[], 1).unwrap();
    let atten = AttenuationModel::default();
    c.bench_function("simulate_channel_data ~950 scatterers", |b| {
        b.iter(|| simulate_channel_data(&probe, black_box(&field), &atten, (0.0, 0.0)).unwrap())
    });
    let channel = simulate_channel_data(&probe, &field, &atten, (0.0, 0.0)).unwrap();
    let grid = BeamformGrid::full(&probe, 96, 96);
    c.bench_function("das_beamform 96x96", |b| {
        b.iter(|| das_beamform(black_box(&channel), &grid).unwrap())
    });
}

fn bench_ssim(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let a: Vec<f64> = (0..96 * 96).map(|_| rng.gen_range(0.0..1.0)).collect();
    let b_img: Vec<f64> = a.iter().map(|v| (v + rng.gen_range(-0.05..0.05)).clamp(0.0, 1.0)).collect();
    c.bench_function("ssim 96x96", |b| {
        b.iter(|| ssim(black_box(&a), &b_img, 96, 96, &SsimParams::default()).unwrap())
    });
}

criterion_group!(benches, bench_conv, bench_unet_step, bench_simulation, bench_ssim);
criterion_main!(benches);
