//! The three Vieta involutions of a (2,2,2) surface in (P^1)^3.
//!
//! Loads the bundled sample surface, applies each involution to a
//! rational point, and checks the defining property sigma^2 = id
//! exactly. Run with `cargo run --example involutions`.

use wehler_dynamics::wehler::sigma_q;
use wehler_dynamics::{GroupWord, ProjPoint1, SurfacePointQ, WehlerSurface};

fn main() {
    let path = format!(
        "{}/../../data/generic_sample.json",
        env!("CARGO_MANIFEST_DIR")
    );
    let s = WehlerSurface::from_json_str(&std::fs::read_to_string(path).unwrap()).unwrap();

    let pt = SurfacePointQ::new(
        ProjPoint1::zero(),
        ProjPoint1::from_pair(1, 1).unwrap(),
        ProjPoint1::from_pair(2, 1).unwrap(),
    );
    assert!(s.is_on_surface_q(&pt), "the base point lies on the surface");
    println!("surface: {}", s.name());
    println!("start:   {pt}");

    for axis in 1..=3u8 {
        let image = sigma_q(&s, axis, &pt).unwrap();
        let back = sigma_q(&s, axis, &image).unwrap();
        assert_eq!(back, pt, "sigma_{axis} is an involution");
        assert!(s.is_on_surface_q(&image));
        println!("sigma_{axis}: {pt} -> {image}");
    }

    // Composed words act by applying the rightmost letter first.
    let f = GroupWord::new(vec![3, 2, 1]).unwrap();
    let mut cur = pt.clone();
    for step in 1..=3 {
        cur = f.apply_q(&s, &cur).unwrap();
        println!(
            "f^{step} moves the point to coordinates with up to {} digits",
            [cur.x.a(), cur.x.b(), cur.y.a(), cur.y.b(), cur.z.a(), cur.z.b()]
                .iter()
                .map(|n| n.to_string().trim_start_matches('-').len())
                .max()
                .unwrap()
        );
    }
    let back = f.inverse().apply_q(&s, &cur).unwrap();
    let back = f.inverse().apply_q(&s, &back).unwrap();
    let back = f.inverse().apply_q(&s, &back).unwrap();
    assert_eq!(back, pt, "the inverse word undoes the forward word");
    println!("f^-3 f^3 = id verified exactly");
}
