#pragma once

#include <httplib.h>

namespace orbitpe::detail {

// httplib defaults to SO_REUSEPORT, which lets a second server bind a port
// that is already in use. Plain SO_REUSEADDR keeps bind failures visible.
inline void use_exclusive_bind(httplib::Server& server) {
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
}

}  // namespace orbitpe::detail
