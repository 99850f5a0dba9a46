use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A matrix split into equal-width block-columns.
#[derive(Debug, Clone)]
pub struct PartitionedMatrix {
    rows: usize,
    width: usize,
    original_cols: usize,
    blocks: Vec<Matrix>,
}

impl PartitionedMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Width of every block.
    pub fn block_width(&self) -> usize {
        self.width
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Column count before padding.
    pub fn original_cols(&self) -> usize {
        self.original_cols
    }

    /// Column count after padding.
    pub fn padded_cols(&self) -> usize {
        self.width * self.blocks.len()
    }

    /// Number of trailing zero columns added to make the split even.
    pub fn padding(&self) -> usize {
        self.padded_cols() - self.original_cols
    }

    pub fn block(&self, index: usize) -> &Matrix {
        &self.blocks[index]
    }

    pub fn blocks(&self) -> &[Matrix] {
        &self.blocks
    }
}

/// Split `matrix` into `blocks` block-columns. Without `pad`, the column
/// count must divide evenly; with it, zero columns are appended first.
pub fn partition_columns(matrix: &Matrix, blocks: usize, pad: bool) -> Result<PartitionedMatrix> {
    if blocks == 0 {
        return Err(Error::InvalidParameter("block count must be positive".into()));
    }
    let cols = matrix.cols();
    let (padded, owned);
    let source = if cols.is_multiple_of(blocks) {
        padded = cols;
        matrix
    } else if pad {
        padded = cols.div_ceil(blocks) * blocks;
        owned = matrix.pad_columns(padded);
        &owned
    } else {
        return Err(Error::Indivisible { cols, blocks });
    };
    let width = padded / blocks;
    Ok(PartitionedMatrix {
        rows: matrix.rows(),
        width,
        original_cols: cols,
        blocks: (0..blocks)
            .map(|b| source.column_block(b * width, width))
            .collect(),
    })
}
