use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use era_bench::keys;
use era_core::arith::derive_rng;
use era_core::group::{ot_query, GroupParams};
use era_core::ope::{serve_mapped_bids, BidSpace, OpeTable};
use era_core::paillier::Randomness;
use era_core::rangeproof::{gen_test_set, prove_range, verify_range};
use num_bigint::BigUint;

fn paillier(c: &mut Criterion) {
    let mut g = c.benchmark_group("paillier");
    for bits in [512u64, 1024] {
        let kp = keys(bits);
        let pk = kp.public();
        let mut rng = derive_rng(b"bench", "paillier");
        let r = Randomness::sample(pk, &mut rng);
        let ct = pk.encrypt_u64(123_456, &r).unwrap();
        g.bench_with_input(BenchmarkId::new("encrypt", bits), &bits, |b, _| {
            b.iter(|| pk.encrypt_u64(black_box(123_456), &r).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("decrypt", bits), &bits, |b, _| {
            b.iter(|| kp.decrypt(black_box(&ct)).unwrap())
        });
        g.bench_with_input(
            BenchmarkId::new("recover_randomness", bits),
            &bits,
            |b, _| b.iter(|| kp.recover_randomness(black_box(&ct)).unwrap()),
        );
    }
    g.finish();
}

fn oblivious_transfer(c: &mut Criterion) {
    let mut g = c.benchmark_group("mapped_bid_ot");
    g.sample_size(10);
    let params = GroupParams::generate(128, b"bench").unwrap();
    for z in [1000usize, 5000, 10_000] {
        let table = OpeTable::generate(BidSpace::new(1, z as u64, 1).unwrap(), 32, 1).unwrap();
        let mut rng = derive_rng(b"bench", "ot");
        g.bench_with_input(BenchmarkId::from_parameter(z), &z, |b, &z| {
            b.iter(|| {
                let (req, rx) = ot_query(z / 2, z, &params, &mut rng).unwrap();
                let batch = serve_mapped_bids(&table, &req, &params, &mut rng).unwrap();
                rx.recover(&batch, &params).unwrap()
            })
        });
    }
    g.finish();
}

fn range_proof(c: &mut Criterion) {
    let mut g = c.benchmark_group("range_proof");
    let kp = keys(1024);
    let pk = kp.public();
    let mut rng = derive_rng(b"bench", "range");
    let ts = gen_test_set(pk, 32, 1, &mut rng).unwrap();
    let r = Randomness::sample(pk, &mut rng);
    let x = BigUint::from(0x9abc_def0u64);
    let ct = pk.encrypt(&x, &r).unwrap();
    let proof = prove_range(pk, &x, &r, &ts).unwrap();
    g.bench_function("gen_test_set_t32", |b| {
        b.iter(|| gen_test_set(pk, 32, 2, &mut rng).unwrap())
    });
    g.bench_function("prove_t32", |b| {
        b.iter(|| prove_range(pk, &x, &r, &ts).unwrap())
    });
    g.bench_function("verify_t32", |b| {
        b.iter(|| verify_range(pk, &ct, &proof, ts.public(), 32).unwrap())
    });
    g.finish();
}

criterion_group!(benches, paillier, oblivious_transfer, range_proof);
criterion_main!(benches);
