#include <stdio.h>
#include "rnd.h"

int main(void) {
    RndInstance *inst = NULL;
    char *out = NULL;
    RndStatus st = rnd_gen_gamma("p cnf 3 1\n1 2 3 0\n", "1/2", 1, &inst);
    if (st != RND_STATUS_OK) {
        fprintf(stderr, "%s\n", rnd_last_error());
        return 1;
    }
    st = rnd_solve(inst, "cong-dyn", NULL, &out);
    if (st != RND_STATUS_OK) {
        fprintf(stderr, "%s\n", rnd_last_error());
        rnd_instance_free(inst);
        return 1;
    }
    puts(out);
    rnd_string_free(out);
    rnd_instance_free(inst);
    return 0;
}
