//! Save an instance as JSON, load it back bit for bit, and watch the loader
//! reject an edited copy.
//!
//!     cargo run --release --example instance_file

use bpdn_testgen::certgen::{construct, MethodChoice};
use bpdn_testgen::cli::{load_instance, save_instance, InstanceFile, LoadError};
use bpdn_testgen::ensembles::{coherence, EnsembleKind, EnsembleSpec, MagnitudeLaw, SolutionSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = construct(
        &EnsembleSpec::new(EnsembleKind::ThreeBasesUnion, 300, 100, 3),
        &SolutionSpec::new(6, MagnitudeLaw::LogUniformDynamicRange { theta: 701.0 }, 3),
        0.1,
        MethodChoice::Auto,
    )?;
    let dir = std::env::temp_dir().join("bpdn-testgen-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("three_bases.json");

    save_instance(&InstanceFile::from_instance(&inst, coherence(&inst.a).ok()), &path)?;
    println!("wrote {} ({} bytes)", path.display(), std::fs::metadata(&path)?.len());

    let (file, back) = load_instance(&path)?;
    let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits());
    println!("b, x*, y, w bit-identical after reload: {}", same(&inst.b, &back.b)
        && same(&inst.x_star, &back.x_star)
        && same(&inst.certificate.y, &back.certificate.y)
        && same(&inst.certificate.w, &back.certificate.w));
    println!("σ = {:.6}, τ = {:.6}, coherence = {:.4}", file.sigma_equiv, file.tau_equiv, file.coherence.unwrap_or(f64::NAN));

    let mut edited = file.clone();
    edited.b[0] += 1.0;
    let bad = dir.join("edited.json");
    save_instance(&edited, &bad)?;
    match load_instance(&bad) {
        Err(e @ LoadError::Tampered { .. }) => println!("edited copy rejected: {e}"),
        other => println!("unexpected: {:?}", other.map(|_| ())),
    }
    Ok(())
}
