"""
Django settings for qnd_proj project.

The project carries no database and no URL routing: Django provides the
settings layer, logging configuration and the management-command CLI.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

from qnd_app import __version__

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables
load_dotenv(BASE_DIR / '.env.local', override=True)
load_dotenv(BASE_DIR / '.env')


SECRET_KEY = os.getenv('SECRET_KEY', 'qnd-insecure-local-only')

DEBUG = os.getenv('DEBUG', '').lower() in ('1', 'true', 'yes')

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "qnd_app",
]

DATABASES = {}

USE_TZ = True

TIME_ZONE = 'UTC'


# Simulator configuration

QND_CACHE_DIR = Path(os.getenv('QND_CACHE_DIR', BASE_DIR / '.qnd_cache'))

# Largest N for which dense (N+1)^2 x (N+1)^2 projector matrices are formed
QND_DENSE_LIMIT = int(os.getenv('QND_DENSE_LIMIT', '12'))

# Largest N accepted by the block joint-SVD construction
QND_SVD_MAX_N = int(os.getenv('QND_SVD_MAX_N', '40'))

QND_TOOL_VERSION = __version__

QND_LOG_LEVEL = os.getenv('QND_LOG_LEVEL', 'INFO').upper()


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'qnd_app': {
            'handlers': ['console'],
            'level': QND_LOG_LEVEL,
            'propagate': False,
        },
    },
}
