#ifndef TAILGAP_VERSION_HPP
#define TAILGAP_VERSION_HPP

#define TAILGAP_VERSION "0.1.0"

#endif
