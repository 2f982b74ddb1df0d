/* Spectral gap of the f0 Dirichlet operator for a qubit Gibbs state.
 *
 *   cargo build -p mdf-ffi --release
 *   cc crates/ffi/examples/gap.c -Icrates/ffi/include -Ltarget/release -lmdf_ffi -lm -o gap
 *   LD_LIBRARY_PATH=target/release ./gap
 */
#include <stdio.h>

#include "mdf.h"

int main(void) {
    /* rho = diag(0.75, 0.25), x = [[0, 1], [0, 0]], interleaved (re, im). */
    const double rho[8] = {0.75, 0.0, 0.0, 0.0, 0.0, 0.0, 0.25, 0.0};
    const double x[8] = {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    MdfStandardForm *sf = NULL;
    MdfSuperOperator *h = NULL;
    double gap = 0.0;
    size_t kernel_dim = 0;

    if (mdf_standard_form_new(2, rho, &sf) != MDF_STATUS_OK) {
        fprintf(stderr, "state: %s\n", mdf_last_error_message());
        return 1;
    }
    MdfStatus status = mdf_dirichlet_operator(sf, x, MDF_KERNEL_F0, 0.0, MDF_ENGINE_EXACT_SPECTRAL, &h);
    if (status == MDF_STATUS_OK) {
        status = mdf_spectral_gap(h, &gap, &kernel_dim);
    }
    if (status != MDF_STATUS_OK) {
        fprintf(stderr, "error %d: %s\n", (int)status, mdf_last_error_message());
    } else {
        printf("mdf %s: gap %.6f, kernel dimension %zu\n", mdf_version(), gap, kernel_dim);
    }
    mdf_superop_free(h);
    mdf_standard_form_free(sf);
    return status == MDF_STATUS_OK ? 0 : 1;
}
