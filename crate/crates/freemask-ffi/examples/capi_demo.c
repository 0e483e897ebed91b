#include <stdio.h>
#include <assert.h>
#include "freemask.h"

int main(void) {
    uint64_t cat = 0;
    assert(fm_catalan(5, &cat) == FM_STATUS_OK && cat == 42);

    double m3 = 0.0;
    assert(fm_mp_moment_closed(3, 0.5, &m3) == FM_STATUS_OK);
    assert(m3 == 2.75);

    FmMask *mask = NULL;
    assert(fm_mask_checkerboard(64, &mask) == FM_STATUS_OK);
    size_t pairs[2] = {1, 2};
    double w = 0.0;
    assert(fm_mask_partition_weight(mask, pairs, 1, &w) == FM_STATUS_OK);
    assert(w == 0.5);
    fm_mask_free(mask);

    assert(fm_catalan(2, NULL) == FM_STATUS_NULL_POINTER);
    printf("c api ok: catalan(5)=%llu m3=%g weight=%g version=%s\n",
           (unsigned long long)cat, m3, w, fm_version());
    return 0;
}
