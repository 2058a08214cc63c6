fn main() {
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let table = aep_core::selfdiff::build_ds_table(&grid, 64, 0.05, 16, 424242).unwrap();
    std::fs::create_dir_all("data").unwrap();
    table.save(std::path::Path::new("data/ds_table.csv")).unwrap();
    let (rho, ds, se) = table.grid();
    for i in 0..rho.len() {
        println!("{:.2} {:.5} {:.5}", rho[i], ds[i], se[i]);
    }
}
