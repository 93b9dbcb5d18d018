from django.apps import AppConfig


class QndAppConfig(AppConfig):
    name = 'qnd_app'
    verbose_name = 'QND stroboscopic simulator'
