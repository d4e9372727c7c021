#include <stdio.h>

#include "damped_search.h"

int main(void) {
    DgsSpace *space = NULL;
    if (dgs_space_new(1024, 1, &space) != DGS_STATUS_OK) {
        fprintf(stderr, "%s\n", dgs_last_error_message());
        return 1;
    }

    double theta = 0.0, phi = 0.0;
    dgs_space_theta(space, &theta);
    dgs_critical_phi_closed(theta, &phi);

    DgsCost base, damped;
    dgs_undamped_expected_calls(space, &base);
    dgs_damped_expected_calls_fixed(space, phi, &damped);
    printf("damped-search %s\n", dgs_version());
    printf("theta=%.6f phi*=%.6f undamped=%.4f damped=%.4f\n",
           theta, phi, base.expected_calls, damped.expected_calls);

    DgsStatus st = dgs_critical_phi_numeric(1.5707963267948966, &phi);
    printf("numeric at pi/2: status=%d (%s)\n", (int)st, dgs_last_error_message());

    dgs_space_free(space);
    return 0;
}
