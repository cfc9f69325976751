use heatdr::bounds_asymptotics::{space_bound_report, Grid};
use heatdr::distance_calculus::MultiIndex;
use heatdr::{HTypeGroup, KernelParams, QuadratureConfig, StandardFamily};

fn main() {
    let heis = HTypeGroup::standard(StandardFamily::Heisenberg, 1).unwrap();
    let p = KernelParams::new(&heis);
    let c = QuadratureConfig::default();
    let j = MultiIndex::new(&heis, vec![0, 1]).unwrap();
    for (nr, nt) in [(24, 14), (48, 28), (96, 56)] {
        let grid = Grid::log(0.01, 20.0, nr, 0.05, 5.0, nt);
        let rep = space_bound_report(&heis, &p, &j, &grid, &c).unwrap();
        println!("grid {nr}x{nt}: sup {:.6} at {:?}", rep.sup_ratio, rep.worst_point);
    }
}
