#include <stdio.h>
#include <string.h>

#include "framelet.h"

#define CHECK(call)                                                              \
    do {                                                                         \
        FmStatus s_ = (call);                                                    \
        if (s_ != FM_STATUS_OK) {                                                \
            fprintf(stderr, "%s -> %d: %s\n", #call, (int)s_, fm_last_error_message()); \
            return 1;                                                            \
        }                                                                        \
    } while (0)

int main(int argc, char **argv) {
    if (argc != 3) {
        fprintf(stderr, "usage: smoke A.json TA.json\n");
        return 2;
    }
    FmDilation *m = NULL;
    FmFilter *a = NULL, *ta = NULL, *b1 = NULL;
    FmBank *bank = NULL;
    CHECK(fm_dilation_new("1 1; 1 -1", &m));
    CHECK(fm_filter_load(argv[1], &a));
    CHECK(fm_filter_load(argv[2], &ta));

    uint32_t sr = 0;
    CHECK(fm_filter_sum_rules(a, m, 16, &sr));
    bool interp = false;
    CHECK(fm_filter_is_interpolatory(a, m, &interp));

    CHECK(fm_dual_bank_build(a, ta, m, 2, 2, FM_FIRST_PAIR_FLIPPED, false, &bank));
    size_t n = 0;
    CHECK(fm_bank_len(bank, &n));
    bool ok = false;
    CHECK(fm_bank_verify(bank, &ok));
    CHECK(fm_bank_high_pass(bank, 0, FM_SIDE_PRIMAL, &b1));
    uint32_t vmo = 0;
    CHECK(fm_filter_vanishing_moments(b1, 16, &vmo));
    double sm2 = 0;
    CHECK(fm_sm2(a, m, FM_SM2_METHOD_EIG, &sm2));

    FmDilation *bad = NULL;
    FmStatus s = fm_dilation_new("1 0; 0 1", &bad);
    const char *msg = fm_last_error_message();

    printf("sr=%u interpolatory=%d pairs=%zu verified=%d vmo_b1=%u sm2=%.4f bad=%d msg=%s\n", sr, interp, n, ok,
           vmo, sm2, (int)s, msg ? msg : "(null)");

    fm_filter_free(b1);
    fm_bank_free(bank);
    fm_filter_free(ta);
    fm_filter_free(a);
    fm_dilation_free(m);
    return 0;
}
