use gpcg::cg::{build_reduced, pcg_progress};
use gpcg::ilu::ilu_k;
use gpcg::{BoundQP, CsrMatrix, IndexSet, Preconditioner, PreconditionerKind};

fn laplacian_2d(m: usize) -> CsrMatrix {
    let n = m * m;
    let mut t = Vec::new();
    for j in 0..m {
        for i in 0..m {
            let k = j * m + i;
            t.push((k, k, 4.0));
            if i > 0 {
                t.push((k, k - 1, -1.0));
            }
            if i + 1 < m {
                t.push((k, k + 1, -1.0));
            }
            if j > 0 {
                t.push((k, k - m, -1.0));
            }
            if j + 1 < m {
                t.push((k, k + m, -1.0));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &t).unwrap()
}

fn pcg_iterations(a: &CsrMatrix, kind: PreconditionerKind) -> usize {
    let n = a.nrows();
    let b: Vec<f64> = (0..n).map(|i| 1.0 + (i % 3) as f64).collect();
    let qp = BoundQP::unconstrained(a.clone(), b, 0.0).unwrap();
    let g = qp.gradient(&vec![0.0; n]).unwrap();
    let sys = build_reduced(&qp, &g, &IndexSet::full(n)).unwrap();
    let p = Preconditioner::build(kind, 1, &sys.matrix).unwrap();
    pcg_progress(&sys, &p, &vec![0.0; n], 1e-12, None).unwrap().iterations
}

#[test]
fn laplacian_fill_improves_pcg() {
    let a = laplacian_2d(4);
    let f0 = ilu_k(&a, 0).unwrap();
    let f2 = ilu_k(&a, 2).unwrap();
    assert_eq!(f0.nnz(), a.nnz());
    assert!(f2.nnz() > f0.nnz());
    let it0 = pcg_iterations(&a, PreconditionerKind::BlockJacobiIlu { fill: 0 });
    let it2 = pcg_iterations(&a, PreconditionerKind::BlockJacobiIlu { fill: 2 });
    assert!(it2 < it0, "ILU(2) {it2} vs ILU(0) {it0}");
}

#[test]
fn more_blocks_weaken_the_preconditioner() {
    let a = laplacian_2d(12);
    let n = a.nrows();
    let b = vec![1.0; n];
    let qp = BoundQP::unconstrained(a, b, 0.0).unwrap();
    let g = qp.gradient(&vec![0.0; n]).unwrap();
    let sys = build_reduced(&qp, &g, &IndexSet::full(n)).unwrap();
    let iters: Vec<usize> = [1, 4, 16]
        .iter()
        .map(|&p| {
            let pre = Preconditioner::build(PreconditionerKind::BlockJacobiIlu { fill: 2 }, p, &sys.matrix).unwrap();
            pcg_progress(&sys, &pre, &vec![0.0; n], 1e-12, None).unwrap().iterations
        })
        .collect();
    assert!(iters[0] <= iters[1] && iters[1] <= iters[2], "{iters:?}");
}
