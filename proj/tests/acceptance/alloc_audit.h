#ifndef HETEROLP_ALLOC_AUDIT_H
#define HETEROLP_ALLOC_AUDIT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct alloc_audit_report {
  size_t largest;  /* bytes, largest single request while armed */
  size_t flagged;  /* requests of at least the threshold */
} alloc_audit_report;

void alloc_audit_begin(size_t flag_at);
alloc_audit_report alloc_audit_end(void);

#ifdef __cplusplus
}
#endif

#endif
