use crate::compile::InteractionPictureProgram;
use crate::noise::{Channel, NoiseSpec};
use crate::pauli::{Pauli, PauliString};

/// Drops rotations that commute with every string the observable can reach.
///
/// Reachable strings lie in the group generated by the observable and the
/// axes of rotations kept so far. A rotation that commutes with all
/// generators commutes with every reachable term and acts as the identity.
pub fn lightcone_filter(program: &InteractionPictureProgram) -> InteractionPictureProgram {
    lightcone_filter_with_noise(program, &[]).0
}

/// Noise-aware variant. Amplitude damping on qubit `q` can map a term `σ` to
/// `σ·Z_q`, so `Z_q` joins the generators from its location onwards. Channel
/// locations are remapped to the filtered rotation list.
pub fn lightcone_filter_with_noise(
    program: &InteractionPictureProgram,
    noise: &[NoiseSpec],
) -> (InteractionPictureProgram, Vec<NoiseSpec>) {
    let mut generators = vec![program.observable.clone()];
    let mut kept = Vec::new();
    let mut kept_before = Vec::with_capacity(program.rotations.len() + 1);
    let add_damping = |j: usize, generators: &mut Vec<PauliString>| {
        for spec in noise.iter().filter(|s| s.after == j) {
            if matches!(spec.channel, Channel::AmplitudeDamping { .. }) && spec.qubit < program.n {
                generators.push(PauliString::from_sparse(program.n, &[(spec.qubit, Pauli::Z)]).expect("qubit checked"));
            }
        }
    };
    for (i, rot) in program.rotations.iter().enumerate() {
        kept_before.push(kept.len());
        add_damping(i, &mut generators);
        if generators.iter().any(|g| g.anticommutes_unchecked(&rot.axis)) {
            generators.push(rot.axis.clone());
            kept.push(rot.clone());
        }
    }
    kept_before.push(kept.len());
    let remapped = noise
        .iter()
        .map(|s| {
            let mut s = *s;
            s.after = kept_before.get(s.after).copied().unwrap_or(s.after);
            s
        })
        .collect();
    (
        InteractionPictureProgram {
            rotations: kept,
            ..program.clone()
        },
        remapped,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::Rotation;
    use crate::propagate::{propagate, propagate_with_noise, PropagationConfig};

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    fn program(obs: &str, rots: &[(&str, f64)]) -> InteractionPictureProgram {
        InteractionPictureProgram {
            n: obs.len(),
            rotations: rots
                .iter()
                .enumerate()
                .map(|(i, (a, t))| Rotation {
                    axis: p(a),
                    theta: *t,
                    source_index: i,
                })
                .collect(),
            observable: p(obs),
            sign: 1,
            angle_transformed: true,
        }
    }

    #[test]
    fn drops_disconnected_rotations() {
        let prog = program("ZII", &[("IXI", 0.3), ("XII", 0.2), ("IXX", 0.1), ("ZXI", 0.4)]);
        let f = lightcone_filter(&prog);
        let axes: Vec<String> = f.rotations.iter().map(|r| r.axis.to_string()).collect();
        assert_eq!(axes, vec!["XII", "ZXI"]);
        let cfg = PropagationConfig::default();
        let a = propagate(&prog, &cfg).unwrap().expectation();
        let b = propagate(&f, &cfg).unwrap().expectation();
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn damping_extends_the_cone() {
        // X on qubit 0 reaches Z_0 only through damping; Z_0 then sees X_0.
        let prog = program("ZI", &[("IX", 0.3), ("IZ", 0.2)]);
        let noise = [NoiseSpec::new(Channel::AmplitudeDamping { lambda: 0.3 }, 1, 1)];
        let (f, nf) = lightcone_filter_with_noise(&prog, &noise);
        assert_eq!(f.rotations.len(), 0);
        assert_eq!(nf[0].after, 0);

        let prog = program("IX", &[("IZ", 0.3), ("IX", 0.2), ("IY", 0.25)]);
        let noise = [NoiseSpec::new(Channel::AmplitudeDamping { lambda: 0.3 }, 1, 1)];
        let (f, nf) = lightcone_filter_with_noise(&prog, &noise);
        assert_eq!(f.rotations.len(), 3);
        assert_eq!(nf[0].after, 1);
        let cfg = PropagationConfig::default();
        let a = propagate_with_noise(&prog, &noise, &cfg).unwrap().expectation();
        let b = propagate_with_noise(&f, &nf, &cfg).unwrap().expectation();
        assert!((a - b).abs() < 1e-14);
    }
}
