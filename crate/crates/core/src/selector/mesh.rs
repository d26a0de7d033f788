use crate::scalar::Scalar;

/// Point `j · 2^-(k+1)` of the level-`k` mesh.
pub fn mesh_point<T: Scalar>(level: u32, j: &[u32]) -> Vec<T> {
    let pitch = T::pow2(-(level as i64) - 1);
    j.iter().map(|&v| T::from_int(v as i64) * pitch.clone()).collect()
}

/// Regular mesh of pitch `2^-(k+1)` on `[0,1]^β` in lexicographic order.
pub fn regular_mesh<T: Scalar>(level: u32, beta: usize) -> Vec<Vec<T>> {
    let side = (1u32 << (level + 1)) + 1;
    let total = (side as usize).pow(beta as u32);
    (0..total)
        .map(|mut f| {
            let mut j = vec![0u32; beta];
            for k in (0..beta).rev() {
                j[k] = (f % side as usize) as u32;
                f /= side as usize;
            }
            mesh_point(level, &j)
        })
        .collect()
}
