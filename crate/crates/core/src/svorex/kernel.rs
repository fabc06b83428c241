use super::data::OrdinalDataset;

/// Gaussian kernel exp(-width · ‖x - y‖²).
pub fn gaussian(x: &[f64], y: &[f64], width: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-width * d2).exp()
}

/// Dense symmetric kernel matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    n: usize,
    data: Vec<f64>,
}

impl KernelMatrix {
    pub fn new(ds: &OrdinalDataset, width: f64) -> Self {
        let n = ds.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
            for j in 0..i {
                let v = gaussian(&ds.features[i], &ds.features[j], width);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_width_zero() {
        let ds = OrdinalDataset::new(vec![vec![0.0, 1.0], vec![3.0, -2.0]], vec![1, 2]).unwrap();
        let k = KernelMatrix::new(&ds, 1.0);
        assert_eq!((k.get(0, 0), k.get(1, 1)), (1.0, 1.0));
        assert_eq!(k.get(0, 1), k.get(1, 0));
        let flat = KernelMatrix::new(&ds, 0.0);
        assert!((0..2).all(|i| flat.row(i).iter().all(|&v| v == 1.0)));
    }

    #[test]
    fn orthogonal_unit_vectors() {
        assert_eq!(gaussian(&[1.0, 0.0], &[0.0, 1.0], 1.0), (-2.0f64).exp());
    }
}
