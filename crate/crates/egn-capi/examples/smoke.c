#include <assert.h>
#include <stdio.h>
#include <string.h>
#include "egn.h"

int main(void) {
    const char *lambda[] = {"2", "3", "4"};
    EgnMatrix *alpha = NULL;
    assert(egn_wheel_alpha(lambda, 3, &alpha) == EGN_STATUS_OK);
    assert(egn_matrix_rows(alpha) == 3 && egn_matrix_cols(alpha) == 3);
    char *entry = NULL;
    assert(egn_matrix_entry(alpha, 0, 1, &entry) == EGN_STATUS_OK);
    assert(strcmp(entry, "1/2") == 0);
    egn_string_free(entry);
    egn_matrix_free(alpha);

    const char *a[] = {"1", "2"};
    const char *b[] = {"-1", "-2"};
    const char *c[] = {"11", "12"};
    EgnCurve *curve = NULL;
    assert(egn_curve_new(2, a, b, c, &curve) == EGN_STATUS_OK);
    assert(egn_curve_genus(curve) == 2);
    char *massey = NULL;
    assert(egn_curve_massey_json(curve, "inf", &massey) == EGN_STATUS_OK);
    assert(strstr(massey, "\"triple_vanishes\":true") != NULL);
    egn_string_free(massey);
    egn_curve_free(curve);

    size_t dim = 0;
    assert(egn_hh_dimension(3, 3, 3, -1, EGN_HH_METHOD_RESOLUTION, &dim) == EGN_STATUS_OK);
    assert(dim == 6);

    assert(egn_curve_new(2, a, a, c, &curve) == EGN_STATUS_BAD_INPUT);
    assert(strstr(egn_last_error(), "distinct") != NULL);
    assert(strcmp(egn_status_name(EGN_STATUS_BAD_INPUT), "bad_input") == 0);

    printf("capi smoke ok\n");
    return 0;
}
