use cod_core::analysis::shares_alamouti;
use cod_core::generator::{construct_g, row_ids, theta};
use cod_core::BitVec;

/// Row pairs `(a, b)` of `G_{2m-1}` and columns `i < j` (1-based) with
/// `α ⊕ β = e ⊕ e_i ⊕ e_j` and both rows nonzero at `i` and `j`.
fn alamouti_pairs(m: usize) -> Vec<(usize, usize, usize, usize)> {
    let rows = row_ids(m).unwrap();
    let e = BitVec::ones(2 * m).unwrap();
    let mut out = Vec::new();
    for (a, &alpha) in rows.iter().enumerate() {
        for (b, &beta) in rows.iter().enumerate().skip(a + 1) {
            for i in 1..2 * m {
                for j in i + 1..2 * m {
                    let target = e.flip(i).flip(j);
                    let nonzero = alpha.get(i) && alpha.get(j) && beta.get(i) && beta.get(j);
                    if nonzero && (alpha ^ beta) == target {
                        out.push((a, b, i, j));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn theta_pair_identity() {
    for m in 1..=4 {
        let rows = row_ids(m).unwrap();
        for (a, b, i, j) in alamouti_pairs(m) {
            let (alpha, beta) = (rows[a], rows[b]);
            let diff = alpha ^ beta;
            for col in [i, j] {
                let lhs = theta(alpha, col).unwrap() ^ theta(beta, col).unwrap();
                let rhs = (diff.partial_weight(col, 2 * m).unwrap() + col) % 2 == 1;
                assert_eq!(lhs, rhs, "m={m} α={alpha} β={beta} i={col}");
            }
        }
    }
}

#[test]
fn alamouti_parity_sum_is_odd() {
    for m in 1..=4 {
        let rows = row_ids(m).unwrap();
        let pairs = alamouti_pairs(m);
        if m >= 2 {
            assert!(!pairs.is_empty());
        }
        for (a, b, i, j) in pairs {
            let (alpha, beta) = (rows[a], rows[b]);
            let sum = theta(alpha, i).unwrap()
                ^ theta(beta, i).unwrap()
                ^ theta(alpha, j).unwrap()
                ^ theta(beta, j).unwrap();
            assert!(sum, "m={m} α={alpha} β={beta} ({i},{j})");
        }
    }
}

#[test]
fn combinatorial_pairs_match_matrix_blocks() {
    for m in 2..=4 {
        let g = construct_g(m).unwrap();
        let expected: Vec<(usize, usize, usize, usize)> = alamouti_pairs(m);
        let mut found = Vec::new();
        for a in 0..g.p() {
            for b in a + 1..g.p() {
                if let Some((i, j)) = shares_alamouti(&g, a, b) {
                    found.push((a, b, i + 1, j + 1));
                }
            }
        }
        assert_eq!(found, expected, "m={m}");
    }
}

#[test]
fn pair_count_at_m2() {
    // the single unconjugated row meets each of the three conjugated rows once
    assert_eq!(alamouti_pairs(2).len(), 3);
}
