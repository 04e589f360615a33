#pragma once

#define CKIS_VERSION "0.1.0"
